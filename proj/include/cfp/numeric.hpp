// Scalar types and small numeric utilities shared by every module.
//
// Two arithmetic channels run through the library:
//   Rational  exact GMP rationals, used whenever a parameter function can be
//             evaluated exactly;
//   Float     MPFR reals with a runtime-selected precision and a widened
//             exponent range, so that quantities like exp(1e16) stay finite.
// Most numerical kernels are templates over the real scalar and are
// instantiated for `double` and `Float`.

#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace cfp {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;
using Float = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultPrecisionBits = 128;
inline constexpr unsigned kMinPrecisionBits = 53;

enum class ErrorCode {
  invalid_argument,
  out_of_range,
  cap_exceeded,
  no_exact_channel,
  no_convergence,
  tail_not_negligible,
  attempts_exhausted,
  io_error,
};

std::string_view to_string(ErrorCode code);

/// Library error carrying a machine-readable code; the CLI turns it into a
/// structured error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Widens the MPFR exponent range to its maximum. Idempotent.
void ensure_wide_exponent_range();

/// Sets the default MPFR precision (in bits, rounded up to what the Boost
/// digits10 interface can express) for the lifetime of the guard.
class WorkingPrecision {
 public:
  explicit WorkingPrecision(unsigned bits);
  ~WorkingPrecision();
  WorkingPrecision(const WorkingPrecision&) = delete;
  WorkingPrecision& operator=(const WorkingPrecision&) = delete;

 private:
  unsigned saved_digits10_;
};

void set_default_precision_bits(unsigned bits);
unsigned default_precision_bits();

/// Parses "3", "-2.5", "1/3", "1e-3", "2.5E+2" into an exact rational.
Rational parse_rational(std::string_view text);

/// A real parameter that remembers whether it is known exactly.
class Number {
 public:
  Number() = default;
  Number(int value) : exact_(Rational(value)), approx_(value) {}  // NOLINT
  Number(const Rational& value)                                   // NOLINT
      : exact_(value), approx_(value.convert_to<double>()) {}
  /// Inexact: a double carries no exact channel.
  static Number inexact(double value);
  static Number parse(std::string_view text);

  bool is_exact() const { return exact_.has_value(); }
  const Rational& exact() const;
  double value() const { return approx_; }
  Float to_float() const;
  bool is_integer() const;
  std::string to_string() const;

  template <class Real>
  Real as() const {
    if constexpr (std::is_same_v<Real, double>) {
      return approx_;
    } else {
      return to_float();
    }
  }

 private:
  std::optional<Rational> exact_;
  double approx_ = 0.0;
};

/// Neumaier-compensated accumulator.
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& x) {
    Real t = sum_ + x;
    if (abs_value(sum_) >= abs_value(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  static Real abs_value(const Real& x) {
    using std::abs;
    return abs(x);
  }
  Real sum_ = Real(0);
  Real comp_ = Real(0);
};

/// log(sum_i exp(x_i)) for a nonempty range.
template <class Real>
Real log_sum_exp(std::span<const Real> terms) {
  using std::exp;
  using std::log;
  if (terms.empty()) throw Error(ErrorCode::invalid_argument, "log_sum_exp of empty range");
  Real top = terms[0];
  for (const auto& t : terms) {
    if (t > top) top = t;
  }
  CompensatedSum<Real> acc;
  for (const auto& t : terms) acc.add(exp(Real(t - top)));
  return top + log(acc.value());
}

inline double to_double(const Float& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Shortest round-trip decimal for doubles; fixed significant digits for Float.
std::string format_real(double x);
std::string format_real(const Float& x, int digits = 0);
std::string format_rational(const Rational& q);

/// SplitMix64 step; used to derive independent per-replica seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

}  // namespace cfp
