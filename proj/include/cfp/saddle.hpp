// Exponential tilting: the root sigma_n of sum_{l<=n} l a_l e^{-l sigma} = n
// and the moment sums evaluated there.

#pragma once

#include "cfp/numeric.hpp"
#include "cfp/params.hpp"

#include <optional>
#include <vector>

namespace cfp {

inline constexpr double kDefaultSaddleTolerance = 1e-12;

/// sum_{l=1}^{n} l^{l_power} a_l e^{-l sigma}, compensated.
/// l_power 0, 1, 2, 3 give S_n(e^{-sigma}), the mean M_n, the variance B_n^2
/// and rho_3 of the tilted sum.
double tilt_sum(const ParameterFunction& f, int n, double sigma, int l_power);
Float tilt_sum(const ParameterFunction& f, int n, const Float& sigma, int l_power);

struct SaddlePoint {
  int n = 0;
  double sigma_n = 0.0;
  double B_n2 = 0.0;          // variance of Y
  double rho_3 = 0.0;         // sum l^3 a_l e^{-l sigma_n}
  double S_n_at_tilt = 0.0;   // sum a_l e^{-l sigma_n}
  double residual = 0.0;      // M_n - n at the returned root
};

/// Bracketing bisection down to width 1e-3, then safeguarded Newton until
/// |M_n - n| <= tol * n.
SaddlePoint solve_sigma(const ParameterFunction& f, int n, double tol = kDefaultSaddleTolerance);

struct GammaSumDiagnostic {
  double finite_sum = 0.0;       // sum_{j=1}^{n} j^k e^{-sigma j}
  double gamma_asymptote = 0.0;  // Gamma(k+1) / sigma^{k+1}
  double ratio = 0.0;
};

/// Throws ErrorCode::tail_not_negligible when the part of the series beyond
/// n exceeds 1e-12 of the asymptote.
GammaSumDiagnostic gamma_sum_diagnostic(double k, double sigma, int n);

struct SigmaTrendRow {
  int n = 0;
  double sigma_n = 0.0;
  /// n^{1/(p+1)} sigma_n for pure power laws; tends to Gamma(p+1)^{1/(p+1)}.
  std::optional<double> normalized;
};

std::vector<SigmaTrendRow> sigma_trend(const ParameterFunction& f, const std::vector<int>& n_grid);

}  // namespace cfp
