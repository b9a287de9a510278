// Parameter functions a = (a_1, a_2, ...), a_j > 0.

#pragma once

#include "cfp/numeric.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cfp {

/// Declared membership in the family F(p1, p2): a_j squeezed between
/// power laws j^{p1-1} and j^{p2-1}. Metadata only, never inferred.
struct FamilyBounds {
  double p1 = 0.0;
  double p2 = 0.0;
};

/// a_j evaluated in both channels.
struct AValue {
  double value = 0.0;
  std::optional<Rational> exact;
};

class ParameterFunction {
 public:
  enum class Kind { power_law, ewens, table, rescaled };

  /// a_j = j^{p-1}, p > 0.
  static ParameterFunction power_law(Number p);
  /// a_j = beta / j, beta > 0.
  static ParameterFunction ewens(Number beta);
  /// a_j = values[j-1]; every entry must be positive.
  static ParameterFunction table(std::vector<Number> values);

  Kind kind() const;
  /// True when every a_j can be produced as an exact rational.
  bool has_exact() const;
  /// Largest admissible index (table length), if any.
  std::optional<int> max_index() const;

  double a(int j) const;
  double log_a(int j) const;
  Float a_float(int j) const;
  Rational a_exact(int j) const;

  template <class Real>
  Real eval(int j) const {
    if constexpr (std::is_same_v<Real, double>) {
      return a(j);
    } else if constexpr (std::is_same_v<Real, Rational>) {
      return a_exact(j);
    } else {
      return a_float(j);
    }
  }

  /// Power-law exponent p when this is a (possibly rescaled) pure power law.
  std::optional<double> power_law_exponent() const;
  /// Rescaling factor accumulated over nested rescales (1 for base kinds).
  double total_scale() const;

  const std::optional<FamilyBounds>& declared_family() const { return declared_; }
  ParameterFunction with_declared_family(double p1, double p2) const;

  std::string describe() const;
  /// Key-value form accepted by from_key_values.
  std::map<std::string, std::string> to_key_values() const;

  /// Builds from `family = powerlaw|ewens|table|rescaled`, `p`, `beta`, `R`,
  /// `table = [..]`, and for `rescaled` also `base = <family>`.
  static ParameterFunction from_key_values(const std::map<std::string, std::string>& kv);

 private:
  struct PowerLaw { Number p; };
  struct Ewens { Number beta; };
  struct Table { std::vector<Number> values; };
  struct Rescaled {
    std::shared_ptr<const ParameterFunction> base;
    Number R;
  };
  using Data = std::variant<PowerLaw, Ewens, Table, Rescaled>;

  explicit ParameterFunction(Data data) : data_(std::move(data)) {}
  void check_index(int j) const;

  Data data_;
  std::optional<FamilyBounds> declared_;

  friend ParameterFunction rescale(const ParameterFunction& f, Number R);
};

/// g with g(j) = R^j f(j). The radius of convergence of sum g(j) x^j is the
/// radius of f divided by R, and c_N(g) = R^N c_N(f).
ParameterFunction rescale(const ParameterFunction& f, Number R);

/// a_j with the exact channel populated whenever the function has one.
AValue eval_a(const ParameterFunction& f, int j);

/// Parses `key = value` lines; `#` starts a comment, surrounding quotes are
/// stripped and `[..]` lists are kept verbatim for the caller to split.
std::map<std::string, std::string> parse_key_value_config(const std::string& text);
std::map<std::string, std::string> load_key_value_config(const std::string& path);

/// Splits "[1, 1/2, 0.25]" or "1,1/2,0.25" into numbers.
std::vector<Number> parse_number_list(const std::string& text);

}  // namespace cfp
