#include "cfp/numeric.hpp"

#include <boost/multiprecision/detail/digits.hpp>

#include <charconv>
#include <mutex>
#include <sstream>

namespace cfp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::cap_exceeded: return "cap_exceeded";
    case ErrorCode::no_exact_channel: return "no_exact_channel";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::tail_not_negligible: return "tail_not_negligible";
    case ErrorCode::attempts_exhausted: return "attempts_exhausted";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

void ensure_wide_exponent_range() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    mpfr_set_emin(mpfr_get_emin_min());
    mpfr_set_emax(mpfr_get_emax_max());
  });
}

namespace {

unsigned digits10_for_bits(unsigned bits) {
  unsigned d = 1;
  while (boost::multiprecision::detail::digits10_2_2(d) < bits) ++d;
  return d;
}

}  // namespace

WorkingPrecision::WorkingPrecision(unsigned bits)
    : saved_digits10_(Float::default_precision()) {
  if (bits < kMinPrecisionBits) {
    throw Error(ErrorCode::invalid_argument,
                "precision_bits must be at least 53, got " + std::to_string(bits));
  }
  ensure_wide_exponent_range();
  Float::default_precision(digits10_for_bits(bits));
}

WorkingPrecision::~WorkingPrecision() { Float::default_precision(saved_digits10_); }

void set_default_precision_bits(unsigned bits) {
  if (bits < kMinPrecisionBits) {
    throw Error(ErrorCode::invalid_argument,
                "precision_bits must be at least 53, got " + std::to_string(bits));
  }
  ensure_wide_exponent_range();
  Float::default_precision(digits10_for_bits(bits));
}

unsigned default_precision_bits() {
  return static_cast<unsigned>(
      boost::multiprecision::detail::digits10_2_2(Float::default_precision()));
}

Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::invalid_argument, "cannot parse number '" + std::string(text) + "'");
  };
  std::string s;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t' && ch != '"') s.push_back(ch);
  }
  if (s.empty()) throw fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw fail();
    return num / den;
  }

  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  std::string digits;
  long long scale = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (; pos < s.size(); ++pos) {
    char ch = s[pos];
    if (ch >= '0' && ch <= '9') {
      digits.push_back(ch);
      seen_digit = true;
      if (seen_point) --scale;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw fail();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw fail();
    ++pos;
    long long exponent = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos + (s[pos] == '+' ? 1 : 0),
                                     s.data() + s.size(), exponent);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw fail();
    scale += exponent;
  }
  if (scale > 4000 || scale < -4000) throw fail();

  BigInt mantissa(digits);
  BigInt ten_power = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
  Rational value = scale >= 0 ? Rational(mantissa * ten_power) : Rational(mantissa, ten_power);
  return negative ? Rational(-value) : value;
}

Number Number::inexact(double value) {
  Number n;
  n.approx_ = value;
  return n;
}

Number Number::parse(std::string_view text) { return Number(parse_rational(text)); }

const Rational& Number::exact() const {
  if (!exact_) throw Error(ErrorCode::no_exact_channel, "number " + to_string() + " is not exact");
  return *exact_;
}

Float Number::to_float() const {
  ensure_wide_exponent_range();
  if (exact_) return Float(*exact_);
  return Float(approx_);
}

bool Number::is_integer() const {
  return exact_ && boost::multiprecision::denominator(*exact_) == 1;
}

std::string Number::to_string() const {
  if (exact_) return format_rational(*exact_);
  return format_real(approx_);
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string format_real(const Float& x, int digits) {
  if (digits <= 0) digits = static_cast<int>(Float::default_precision());
  return x.str(digits, std::ios_base::scientific);
}

std::string format_rational(const Rational& q) { return q.str(); }

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace cfp
