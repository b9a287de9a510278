// c_0, ..., c_N from the convolution recurrence
//   c_0 = 1,  (n+1) c_{n+1} = sum_{j=0}^{n} (j+1) a_{j+1} c_{n-j}.

#pragma once

#include "cfp/numeric.hpp"
#include "cfp/params.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cfp {

struct SeqMode {
  enum class Kind { rational, floating };
  Kind kind = Kind::floating;
  /// Precision of the extended-precision channel (log values, float mode).
  unsigned precision_bits = kDefaultPrecisionBits;

  static SeqMode rational(unsigned bits = kDefaultPrecisionBits) { return {Kind::rational, bits}; }
  static SeqMode floating(unsigned bits = kDefaultPrecisionBits) { return {Kind::floating, bits}; }
  std::string to_string() const;
};

class CnSequence {
 public:
  CnSequence(ParameterFunction f, SeqMode mode, std::vector<Float> values,
             std::optional<std::vector<Rational>> rationals);

  int N() const { return static_cast<int>(values_.size()) - 1; }
  const ParameterFunction& f() const { return f_; }
  const SeqMode& mode() const { return mode_; }

  /// c_n in extended precision; MPFR's exponent range holds c_n for any
  /// practical n, so no scaling is needed.
  const std::vector<Float>& values() const { return values_; }
  const std::vector<Float>& log_values() const { return log_values_; }
  const std::optional<std::vector<Rational>>& rational_values() const { return rationals_; }

  const Float& c(int n) const { return values_.at(static_cast<std::size_t>(n)); }
  const Float& log_c(int n) const { return log_values_.at(static_cast<std::size_t>(n)); }
  double log_c_double(int n) const { return to_double(log_c(n)); }
  const Rational& c_exact(int n) const;

 private:
  ParameterFunction f_;
  SeqMode mode_;
  std::vector<Float> values_;
  std::vector<Float> log_values_;
  std::optional<std::vector<Rational>> rationals_;
};

CnSequence compute_cn(const ParameterFunction& f, int N, SeqMode mode = SeqMode::floating());

struct RatioRow {
  int n;
  double ratio;  // c_n / c_{n+1}
};

std::vector<RatioRow> ratio_table(const CnSequence& seq);

/// |(n+1) c_{n+1} - sum_j (j+1) a_{j+1} c_{n-j}| / ((n+1) c_{n+1}), evaluated
/// at twice the sequence precision from the stored values.
Float recurrence_residual(const CnSequence& seq, int n);

}  // namespace cfp
