#include "cfp/llt.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace cfp {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kTwoPi = boost::math::constants::two_pi<double>();

const SaddlePoint& require_saddle(const TiltedModel& m) {
  if (!m.saddle) throw Error(ErrorCode::invalid_argument, "model is not at the saddle point sigma_n");
  return *m.saddle;
}

// Distance from x to the nearest integer, as a signed offset in [-1/2, 1/2].
double wrap(double x) { return x - std::nearbyint(x); }

// Subnormal doubles make the convolution orders of magnitude slower; mass
// below this level is dropped (it is far below every reported tolerance).
constexpr double kFlushBelow = 1e-290;
double flush(double x) { return x < kFlushBelow ? 0.0 : x; }
Float flush(Float x) { return x; }

std::vector<double> poisson_weights(double lambda, int kmax) {
  std::vector<double> w(static_cast<std::size_t>(kmax) + 1);
  const double log_lambda = std::log(lambda);
  for (int k = 0; k <= kmax; ++k) {
    w[static_cast<std::size_t>(k)] = flush(std::exp(-lambda + k * log_lambda - std::lgamma(k + 1.0)));
  }
  // past the mode the weights only shrink
  while (w.size() > 1 && w.back() == 0.0 && static_cast<double>(w.size()) > lambda + 1) w.pop_back();
  return w;
}

std::vector<Float> poisson_weights(const Float& lambda, int kmax) {
  std::vector<Float> w(static_cast<std::size_t>(kmax) + 1);
  w[0] = exp(-lambda);
  for (int k = 1; k <= kmax; ++k) w[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k - 1)] * lambda / k;
  return w;
}

template <class Real>
Real lambda_at(const TiltedModel& m, int l) {
  if constexpr (std::is_same_v<Real, double>) {
    return m.lambda(l);
  } else {
    return Real(m.f.a_float(l) * exp(Real(-l * Real(m.sigma))));
  }
}

}  // namespace

TiltedModel TiltedModel::at_sigma(const ParameterFunction& f, int n, double sigma) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "tilted model needs n >= 1");
  TiltedModel m{f, n, sigma, {}, std::nullopt};
  m.lambdas.reserve(static_cast<std::size_t>(n));
  for (int l = 1; l <= n; ++l) m.lambdas.push_back(std::exp(f.log_a(l) - l * sigma));
  return m;
}

TiltedModel TiltedModel::at_saddle(const ParameterFunction& f, int n, double tol) {
  SaddlePoint sp = solve_sigma(f, n, tol);
  TiltedModel m = at_sigma(f, n, sp.sigma_n);
  m.saddle = sp;
  return m;
}

template <class Real>
YDistribution<Real> y_distribution(const TiltedModel& m, int top) {
  if (top < 0 || top > kMaxConvolutionTop) {
    throw Error(ErrorCode::cap_exceeded, "convolution top " + std::to_string(top) + " outside [0, " +
                                             std::to_string(kMaxConvolutionTop) + "]");
  }
  if constexpr (!std::is_same_v<Real, double>) ensure_wide_exponent_range();
  const auto size = static_cast<std::size_t>(top) + 1;
  std::vector<Real> pmf(size, Real(0));
  pmf[0] = 1;
  for (int l = 1; l <= m.n; ++l) {
    const int kmax = top / l;
    const std::vector<Real> w = poisson_weights(lambda_at<Real>(m, l), kmax);
    // In place, from the top down: pmf[j - k l] for k >= 1 is still the old value.
    const int kw = static_cast<int>(w.size()) - 1;
    for (int j = top; j >= 0; --j) {
      Real acc = pmf[static_cast<std::size_t>(j)] * w[0];
      for (int k = 1, i = j - l; i >= 0 && k <= kw; ++k, i -= l) {
        acc += pmf[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(k)];
      }
      pmf[static_cast<std::size_t>(j)] = flush(std::move(acc));
    }
  }
  Real total = 0;
  for (const auto& p : pmf) total += p;
  return {std::move(pmf), Real(1 - total)};
}

template YDistribution<double> y_distribution<double>(const TiltedModel&, int);
template YDistribution<Float> y_distribution<Float>(const TiltedModel&, int);

std::complex<double> char_fn(const TiltedModel& m, double alpha) {
  CompensatedSum<double> re;
  CompensatedSum<double> im;
  for (int l = 1; l <= m.n; ++l) {
    const double frac = wrap(alpha * l);
    const double s = std::sin(kPi * frac);
    re.add(-2.0 * m.lambda(l) * s * s);
    im.add(m.lambda(l) * std::sin(kTwoPi * frac));
  }
  return std::polar(std::exp(re.value()), im.value());
}

double chernoff_upper_tail(const TiltedModel& m, double t) {
  // The exponent is convex in theta; golden-section search on (0, theta_max].
  auto exponent = [&](double theta) {
    CompensatedSum<double> acc;
    acc.add(-theta * t);
    for (int l = 1; l <= m.n; ++l) acc.add(m.lambda(l) * std::expm1(theta * l));
    return acc.value();
  };
  const double theta_max = 600.0 / m.n;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0;
  double b = theta_max;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = exponent(c);
  double fd = exponent(d);
  for (int it = 0; it < 200 && b - a > 1e-12 * theta_max; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = exponent(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = exponent(d);
    }
  }
  return std::exp(std::min({fc, fd, 0.0}));
}

QuadratureResult integral_T(const TiltedModel& m, int target, int nodes) {
  if (target < 0) throw Error(ErrorCode::invalid_argument, "target must be >= 0");
  constexpr double kTailLimit = 1e-13;
  QuadratureResult out;
  if (nodes <= 0) {
    nodes = 64;
    while (nodes <= target || chernoff_upper_tail(m, static_cast<double>(target) + nodes) >= kTailLimit) {
      if (nodes > (1 << 24)) throw Error(ErrorCode::cap_exceeded, "no admissible node count below 2^24");
      nodes *= 2;
    }
  }
  if (nodes < 2 || nodes <= target) {
    throw Error(ErrorCode::invalid_argument, "nodes must exceed the target");
  }
  out.nodes = nodes;
  out.tail_bound = chernoff_upper_tail(m, static_cast<double>(target) + nodes);
  if (!(out.tail_bound < kTailLimit)) {
    throw Error(ErrorCode::tail_not_negligible,
                "nodes = " + std::to_string(nodes) + " too small: aliasing tail bound " + format_real(out.tail_bound));
  }

  const auto M = static_cast<std::size_t>(nodes);
  std::vector<double> sin_sq(M);
  std::vector<double> sin_two(M);
  for (std::size_t r = 0; r < M; ++r) {
    const double frac = wrap(static_cast<double>(r) / nodes);
    const double s = std::sin(kPi * frac);
    sin_sq[r] = s * s;
    sin_two[r] = std::sin(kTwoPi * frac);
  }
  CompensatedSum<double> re;
  CompensatedSum<double> im;
  for (std::size_t k = 0; k < M; ++k) {
    double log_mod = 0.0;
    double phase = 0.0;
    std::size_t r = 0;
    for (int l = 1; l <= m.n; ++l) {
      r = (r + k) % M;  // r = k l mod M
      log_mod -= 2.0 * m.lambda(l) * sin_sq[r];
      phase += m.lambda(l) * sin_two[r];
    }
    const std::size_t shift = (k * static_cast<std::size_t>(target)) % M;
    const double angle = phase - kTwoPi * wrap(static_cast<double>(shift) / nodes);
    const double mod = std::exp(log_mod);
    re.add(mod * std::cos(angle));
    im.add(mod * std::sin(angle));
  }
  out.value = re.value() / nodes;
  out.imag_residual = std::abs(im.value() / nodes);
  if (!(out.imag_residual < 1e-12)) {
    throw Error(ErrorCode::no_convergence, "imaginary residual " + format_real(out.imag_residual));
  }
  return out;
}

double v_n_alpha(const TiltedModel& m, double alpha) {
  CompensatedSum<double> acc;
  for (int l = 1; l <= m.n; ++l) {
    const double d = wrap(alpha * l);
    acc.add(m.lambda(l) * d * d);
  }
  return acc.value();
}

SplitT split_T(const TiltedModel& m, double p_hint) {
  const SaddlePoint& sp = require_saddle(m);
  if (m.n < 3) throw Error(ErrorCode::invalid_argument, "split needs n >= 3");
  const double log_n = std::log(static_cast<double>(m.n));
  SplitT out;
  out.alpha0 = log_n / std::sqrt(sp.B_n2);
  out.alpha0_power_law = std::pow(sp.sigma_n, (p_hint + 2.0) / 2.0) * log_n;
  if (out.alpha0 >= 0.5) {
    out.alpha0 = 0.5;
    out.degenerate = true;
  }

  const double target = static_cast<double>(m.n);
  auto integrand = [&](double alpha) {
    std::complex<double> v = char_fn(m, alpha) * std::polar(1.0, -kTwoPi * wrap(alpha * target));
    return v.real();
  };
  // The integrand is even in alpha, so integrate [0, alpha0] and double.
  out.T1 = 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, out.alpha0, 12, 1e-10);

  if (out.degenerate) {
    out.v_min = 0.0;
    out.T2_grid_max = 0.0;
    out.lemma7_holds = false;
    return out;
  }
  constexpr int kGrid = 4096;
  out.v_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double alpha = out.alpha0 + (0.5 - out.alpha0) * i / (kGrid - 1);
    out.T2_grid_max = std::max(out.T2_grid_max, std::abs(char_fn(m, alpha)));
    out.v_min = std::min(out.v_min, v_n_alpha(m, alpha));
  }
  out.gamma_fit = out.v_min / (log_n * log_n);
  out.lemma7_holds = out.T2_grid_max <= std::exp(-8.0 * out.v_min) * (1.0 + 1e-12) &&
                     out.T2_grid_max < 1e-3 * out.T1;
  return out;
}

double llt_ratio(const TiltedModel& m) { return shifted_ratio(m, 0); }

double shifted_ratio(const TiltedModel& m, int h) {
  const SaddlePoint& sp = require_saddle(m);
  const int target = m.n + h;
  if (target < 0) throw Error(ErrorCode::invalid_argument, "n + h must be >= 0");
  const auto dist = y_distribution<double>(m, target);
  return dist.pmf[static_cast<std::size_t>(target)] * std::sqrt(2.0 * kPi * sp.B_n2);
}

double lyapunov_ratio(const TiltedModel& m) {
  const SaddlePoint& sp = require_saddle(m);
  return sp.rho_3 / std::pow(sp.B_n2, 1.5);
}

}  // namespace cfp
