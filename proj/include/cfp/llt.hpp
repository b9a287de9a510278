// The tilted independent array X_1, ..., X_n, with X_l = l * Poisson(lambda_l)
// and lambda_l = a_l e^{-sigma l}, and three routes to Pr(Y = n) for
// Y = X_1 + ... + X_n: exact convolution, trapezoid inversion of the
// characteristic function, and the normal local approximation.

#pragma once

#include "cfp/numeric.hpp"
#include "cfp/params.hpp"
#include "cfp/saddle.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace cfp {

inline constexpr int kMaxConvolutionTop = 20000;

struct TiltedModel {
  ParameterFunction f;
  int n = 0;
  double sigma = 0.0;
  std::vector<double> lambdas;  // lambdas[l-1] = a_l e^{-sigma l}
  std::optional<SaddlePoint> saddle;

  static TiltedModel at_sigma(const ParameterFunction& f, int n, double sigma);
  static TiltedModel at_saddle(const ParameterFunction& f, int n, double tol = kDefaultSaddleTolerance);

  double lambda(int l) const { return lambdas[static_cast<std::size_t>(l - 1)]; }
};

template <class Real>
struct YDistribution {
  std::vector<Real> pmf;  // Pr(Y = j), j = 0..top
  Real deficit;           // 1 - sum(pmf), the mass above top
};

/// Truncated convolution over {0, ..., top}. Every X_l is nonnegative, so the
/// entries are exact probabilities; only the mass above top is dropped.
/// Instantiated for double and Float (the latter recomputes lambda_l in
/// extended precision).
template <class Real>
YDistribution<Real> y_distribution(const TiltedModel& m, int top);

extern template YDistribution<double> y_distribution<double>(const TiltedModel&, int);
extern template YDistribution<Float> y_distribution<Float>(const TiltedModel&, int);

/// phi(alpha) = exp(sum_l lambda_l (e^{2 pi i alpha l} - 1)).
std::complex<double> char_fn(const TiltedModel& m, double alpha);

struct QuadratureResult {
  double value = 0.0;          // real part of the trapezoid sum
  double imag_residual = 0.0;  // |imaginary part|
  int nodes = 0;
  double tail_bound = 0.0;     // Chernoff bound on the aliased mass
};

/// Uniform trapezoid rule for int_0^1 phi(alpha) e^{-2 pi i alpha target}.
/// With M nodes this equals sum_{j = target mod M} Pr(Y = j) exactly, so the
/// error is the mass at target + M, target + 2M, ...; nodes = 0 picks the
/// smallest power of two whose Chernoff bound on that mass is below 1e-13.
QuadratureResult integral_T(const TiltedModel& m, int target, int nodes = 0);

/// Chernoff bound Pr(Y >= t) <= min_theta exp(-theta t + sum lambda_l (e^{theta l} - 1)).
double chernoff_upper_tail(const TiltedModel& m, double t);

struct SplitT {
  double alpha0 = 0.0;             // min(1/2, log n / B_n)
  double alpha0_power_law = 0.0;   // sigma_n^{(p+2)/2} log n for the supplied p
  double T1 = 0.0;                 // integral over [-alpha0, alpha0]
  double T2_grid_max = 0.0;        // max |phi| on a 4096-point grid of [alpha0, 1/2]
  double v_min = 0.0;              // min V_n(alpha) on the same grid
  double gamma_fit = 0.0;          // v_min / log^2 n
  bool degenerate = false;         // alpha0 reached 1/2
  bool lemma7_holds = false;       // T2 <= exp(-8 v_min) and T2 < 1e-3 T1
};

SplitT split_T(const TiltedModel& m, double p_hint);

/// V_n(alpha) = sum_j lambda_j ||alpha j||^2, ||x|| the distance to Z.
double v_n_alpha(const TiltedModel& m, double alpha);

/// Pr(Y = n) sqrt(2 pi B_n^2).
double llt_ratio(const TiltedModel& m);
/// Pr(Y = n + h) sqrt(2 pi B_n^2).
double shifted_ratio(const TiltedModel& m, int h);
/// rho_3 / B_n^3.
double lyapunov_ratio(const TiltedModel& m);

}  // namespace cfp
