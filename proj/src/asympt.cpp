#include "cfp/asympt.hpp"

#include "cfp/saddle.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numeric>

namespace cfp {

namespace {
constexpr double kTwoPi = boost::math::constants::two_pi<double>();
}

AsymptoticEstimate cn_asymptotic(const ParameterFunction& f, int n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "asymptotic estimate needs n >= 2");
  const SaddlePoint sp = solve_sigma(f, n);
  AsymptoticEstimate est;
  est.n = n;
  est.parts.n_sigma = n * sp.sigma_n;
  est.parts.S_n_at_tilt = sp.S_n_at_tilt;
  est.parts.half_log_2piB2 = 0.5 * std::log(kTwoPi * sp.B_n2);
  est.log_cn_est = est.parts.n_sigma + est.parts.S_n_at_tilt - est.parts.half_log_2piB2;
  if (f.kind() == ParameterFunction::Kind::power_law) {
    const PowerLawPrediction pred = powerlaw_prediction(*f.power_law_exponent(), n);
    est.family_constants = AsymptoticEstimate::FamilyConstants{pred.A_p, pred.log_cn_pred};
  }
  return est;
}

double powerlaw_A(double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::invalid_argument, "power-law exponent must be positive");
  return (1.0 + 1.0 / p) * std::pow(boost::math::tgamma(p + 1.0), 1.0 / (p + 1.0));
}

PowerLawPrediction powerlaw_prediction(double p, int n) {
  if (!(p > 0.0)) throw Error(ErrorCode::invalid_argument, "power-law exponent must be positive");
  if (n < 1) throw Error(ErrorCode::invalid_argument, "n must be >= 1");
  const double g1 = boost::math::tgamma(p + 1.0);
  const double g2 = boost::math::tgamma(p + 2.0);
  const double scaled = n / g1;
  const double log_n = std::log(static_cast<double>(n));
  PowerLawPrediction out;
  out.sigma_pred = std::pow(scaled, -1.0 / (p + 1.0));
  out.B2_pred = std::pow(scaled, (p + 2.0) / (p + 1.0)) * g2;
  // The n^{p/(p+1)} factor is required for consistency with A(p) below.
  out.n_sigma_pred = std::pow(g1, 1.0 / (p + 1.0)) * std::pow(static_cast<double>(n), p / (p + 1.0));
  out.S_pred = out.n_sigma_pred / p;
  out.A_p = powerlaw_A(p);
  out.log_cn_pred = out.A_p * std::pow(static_cast<double>(n), p / (p + 1.0)) - 0.5 * std::log(kTwoPi) -
                    (p + 2.0) / (2.0 * p + 2.0) * (log_n - std::log(g1)) - 0.5 * std::log(g2);
  return out;
}

std::vector<ConjectureRow> conjecture_check(const CnSequence& seq, const std::vector<int>& n_grid) {
  const ParameterFunction& f = seq.f();
  std::vector<ConjectureRow> rows;
  rows.reserve(n_grid.size());
  for (int n : n_grid) {
    if (n < 1 || n >= seq.N()) {
      throw Error(ErrorCode::out_of_range, "conjecture row n = " + std::to_string(n) + " needs c_{n+1}");
    }
    const SaddlePoint sp = solve_sigma(f, n);
    ConjectureRow row;
    row.n = n;
    const double log_cn = seq.log_c_double(n);
    row.lhs = to_double(exp(Float(seq.log_c(n + 1) - seq.log_c(n))));
    row.rhs = std::exp(sp.sigma_n) + std::exp(f.log_a(n + 1) - log_cn);
    row.gap = std::abs(row.lhs - row.rhs) / row.lhs;
    row.a_over_c = std::exp(f.log_a(n) - log_cn);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ConjectureRow> conjecture_check(const ParameterFunction& f, int N) {
  if (N < 3) throw Error(ErrorCode::invalid_argument, "conjecture check needs N >= 3");
  const CnSequence seq = compute_cn(f, N);
  std::vector<int> grid(static_cast<std::size_t>(N - 1));
  std::iota(grid.begin(), grid.end(), 1);
  return conjecture_check(seq, grid);
}

}  // namespace cfp
