#include "cfp/saddle.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>

namespace cfp {

namespace {

// log(l) and log(a_l) for l = 1..n, reused across the root iterations.
struct LogTerms {
  std::vector<double> log_l;
  std::vector<double> log_a;

  LogTerms(const ParameterFunction& f, int n) : log_l(static_cast<std::size_t>(n)), log_a(static_cast<std::size_t>(n)) {
    for (int l = 1; l <= n; ++l) {
      log_l[static_cast<std::size_t>(l - 1)] = std::log(static_cast<double>(l));
      log_a[static_cast<std::size_t>(l - 1)] = f.log_a(l);
    }
  }

  double sum(double sigma, int l_power) const {
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < log_l.size(); ++i) {
      double exponent = l_power * log_l[i] + log_a[i] - static_cast<double>(i + 1) * sigma;
      acc.add(std::exp(exponent));
    }
    return acc.value();
  }
};

void check_n(int n, const ParameterFunction& f) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "tilting needs n >= 1");
  if (auto limit = f.max_index(); limit && n > *limit) {
    throw Error(ErrorCode::out_of_range, "n = " + std::to_string(n) + " exceeds table length");
  }
}

}  // namespace

double tilt_sum(const ParameterFunction& f, int n, double sigma, int l_power) {
  check_n(n, f);
  return LogTerms(f, n).sum(sigma, l_power);
}

Float tilt_sum(const ParameterFunction& f, int n, const Float& sigma, int l_power) {
  check_n(n, f);
  ensure_wide_exponent_range();
  const Float x = exp(-sigma);
  Float x_power = 1;
  Float acc = 0;
  for (int l = 1; l <= n; ++l) {
    x_power *= x;
    Float term = f.a_float(l) * x_power;
    for (int k = 0; k < l_power; ++k) term *= l;
    acc += term;
  }
  return acc;
}

SaddlePoint solve_sigma(const ParameterFunction& f, int n, double tol) {
  check_n(n, f);
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tolerance must be positive");
  const LogTerms terms(f, n);
  const double target = static_cast<double>(n);
  auto excess = [&](double s) { return terms.sum(s, 1) - target; };  // decreasing in s
  const double accept = tol * target;

  double lo = -1.0;
  double hi = 1.0;
  double g_lo = excess(lo);
  double g_hi = excess(hi);
  for (int i = 0; g_lo < 0.0; ++i) {
    if (i == 200) throw Error(ErrorCode::no_convergence, "saddle bracket expansion failed (lower end)");
    lo *= 2.0;
    g_lo = excess(lo);
  }
  for (int i = 0; g_hi > 0.0; ++i) {
    if (i == 200) throw Error(ErrorCode::no_convergence, "saddle bracket expansion failed (upper end)");
    hi *= 2.0;
    g_hi = excess(hi);
  }

  double sigma = 0.5 * (lo + hi);
  double g = excess(sigma);
  int steps = 0;
  while (hi - lo > 1e-3 && std::abs(g) > accept) {
    if (++steps > 200) throw Error(ErrorCode::no_convergence, "saddle bisection did not converge");
    (g > 0.0 ? lo : hi) = sigma;
    sigma = 0.5 * (lo + hi);
    g = excess(sigma);
  }
  while (std::abs(g) > accept) {
    if (++steps > 200) throw Error(ErrorCode::no_convergence, "saddle Newton iteration did not converge");
    (g > 0.0 ? lo : hi) = sigma;
    double slope = terms.sum(sigma, 2);
    double next = sigma + g / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == sigma) break;
    sigma = next;
    g = excess(sigma);
  }
  if (!(std::abs(g) <= accept)) {
    throw Error(ErrorCode::no_convergence, "saddle residual " + format_real(g) + " above tolerance");
  }

  SaddlePoint sp;
  sp.n = n;
  sp.sigma_n = sigma;
  sp.residual = g;
  sp.S_n_at_tilt = terms.sum(sigma, 0);
  sp.B_n2 = terms.sum(sigma, 2);
  sp.rho_3 = terms.sum(sigma, 3);
  return sp;
}

GammaSumDiagnostic gamma_sum_diagnostic(double k, double sigma, int n) {
  if (!(k > -1.0) || !(sigma > 0.0) || n < 1) {
    throw Error(ErrorCode::invalid_argument, "gamma sum needs k > -1, sigma > 0, n >= 1");
  }
  GammaSumDiagnostic d;
  d.gamma_asymptote = boost::math::tgamma(k + 1.0) / std::pow(sigma, k + 1.0);
  // Beyond the mode k/sigma the summand decreases, so the integral from n
  // bounds the tail of the series.
  const double x = sigma * n;
  const double tail = n > k / sigma ? boost::math::tgamma(k + 1.0, x) / std::pow(sigma, k + 1.0)
                                    : std::numeric_limits<double>::infinity();
  if (!(tail <= 1e-12 * d.gamma_asymptote)) {
    throw Error(ErrorCode::tail_not_negligible,
                "series tail beyond n is not negligible; increase n or sigma");
  }
  CompensatedSum<double> acc;
  for (int j = 1; j <= n; ++j) acc.add(std::exp(k * std::log(static_cast<double>(j)) - sigma * j));
  d.finite_sum = acc.value();
  d.ratio = d.finite_sum / d.gamma_asymptote;
  return d;
}

std::vector<SigmaTrendRow> sigma_trend(const ParameterFunction& f, const std::vector<int>& n_grid) {
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw Error(ErrorCode::invalid_argument, "n-grid must be increasing");
  }
  const auto p = f.power_law_exponent();
  const bool pure = p && f.kind() == ParameterFunction::Kind::power_law;
  std::vector<SigmaTrendRow> rows;
  for (int n : n_grid) {
    SigmaTrendRow row;
    row.n = n;
    row.sigma_n = solve_sigma(f, n).sigma_n;
    if (pure) row.normalized = std::pow(static_cast<double>(n), 1.0 / (*p + 1.0)) * row.sigma_n;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cfp
