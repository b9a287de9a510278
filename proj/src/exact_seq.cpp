#include "cfp/exact_seq.hpp"

namespace cfp {

std::string SeqMode::to_string() const {
  return kind == Kind::rational ? "rational" : "float(" + std::to_string(precision_bits) + ")";
}

CnSequence::CnSequence(ParameterFunction f, SeqMode mode, std::vector<Float> values,
                       std::optional<std::vector<Rational>> rationals)
    : f_(std::move(f)), mode_(mode), values_(std::move(values)), rationals_(std::move(rationals)) {
  WorkingPrecision prec(mode_.precision_bits);
  log_values_.reserve(values_.size());
  for (const auto& v : values_) log_values_.push_back(log(v));
}

const Rational& CnSequence::c_exact(int n) const {
  if (!rationals_) throw Error(ErrorCode::no_exact_channel, "sequence was computed in float mode");
  return rationals_->at(static_cast<std::size_t>(n));
}

CnSequence compute_cn(const ParameterFunction& f, int N, SeqMode mode) {
  if (N < 0) throw Error(ErrorCode::invalid_argument, "N must be >= 0");
  if (mode.precision_bits < kMinPrecisionBits) {
    throw Error(ErrorCode::invalid_argument, "precision_bits < 53 rejected");
  }
  if (auto limit = f.max_index(); limit && N > *limit) {
    throw Error(ErrorCode::out_of_range, "c_" + std::to_string(N) + " needs a_1..a_" + std::to_string(N) +
                                             " but the table has " + std::to_string(*limit) + " entries");
  }
  WorkingPrecision prec(mode.precision_bits);
  const auto size = static_cast<std::size_t>(N) + 1;

  if (mode.kind == SeqMode::Kind::rational) {
    if (!f.has_exact()) {
      throw Error(ErrorCode::no_exact_channel, "rational mode requires an exact channel; " + f.describe() +
                                                   " has none");
    }
    std::vector<Rational> weights(size);  // weights[k] = k a_k
    for (int k = 1; k <= N; ++k) weights[static_cast<std::size_t>(k)] = k * f.a_exact(k);
    std::vector<Rational> c(size);
    c[0] = 1;
    for (int n = 0; n < N; ++n) {
      Rational acc = 0;
      for (int j = 0; j <= n; ++j) acc += weights[static_cast<std::size_t>(j + 1)] * c[static_cast<std::size_t>(n - j)];
      c[static_cast<std::size_t>(n + 1)] = acc / (n + 1);
    }
    std::vector<Float> values;
    values.reserve(size);
    for (const auto& q : c) values.emplace_back(q);
    return CnSequence(f, mode, std::move(values), std::move(c));
  }

  // Every term is positive, so the forward recurrence has no cancellation.
  std::vector<Float> weights(size);
  for (int k = 1; k <= N; ++k) weights[static_cast<std::size_t>(k)] = k * f.a_float(k);
  std::vector<Float> c(size);
  c[0] = 1;
  Float acc;
  for (int n = 0; n < N; ++n) {
    acc = 0;
    for (int j = 0; j <= n; ++j) acc += weights[static_cast<std::size_t>(j + 1)] * c[static_cast<std::size_t>(n - j)];
    c[static_cast<std::size_t>(n + 1)] = acc / (n + 1);
  }
  return CnSequence(f, mode, std::move(c), std::nullopt);
}

std::vector<RatioRow> ratio_table(const CnSequence& seq) {
  if (seq.N() < 1) throw Error(ErrorCode::invalid_argument, "ratio table needs at least c_0 and c_1");
  std::vector<RatioRow> rows;
  rows.reserve(static_cast<std::size_t>(seq.N()));
  for (int n = 0; n < seq.N(); ++n) {
    Float diff = seq.log_c(n) - seq.log_c(n + 1);
    rows.push_back({n, to_double(exp(diff))});
  }
  return rows;
}

Float recurrence_residual(const CnSequence& seq, int n) {
  if (n < 0 || n >= seq.N()) throw Error(ErrorCode::out_of_range, "residual index out of range");
  WorkingPrecision prec(2 * seq.mode().precision_bits);
  Float acc = 0;
  for (int j = 0; j <= n; ++j) acc += (j + 1) * seq.f().a_float(j + 1) * seq.c(n - j);
  Float lhs = (n + 1) * seq.c(n + 1);
  return abs(lhs - acc) / lhs;
}

}  // namespace cfp
