#include "cfp/exact_seq.hpp"
#include "cfp/llt.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

using namespace cfp;

namespace {

const double kPi = std::numbers::pi;

TiltedModel single() { return TiltedModel::at_sigma(ParameterFunction::power_law(1), 1, 0.0); }

}  // namespace

TEST_CASE("tilted model") {
  const auto m = TiltedModel::at_saddle(ParameterFunction::power_law(2), 40);
  REQUIRE(m.saddle);
  CHECK(m.lambdas.size() == 40);
  double mean = 0;
  for (int l = 1; l <= 40; ++l) {
    CHECK(m.lambda(l) > 0);
    mean += l * m.lambda(l);
  }
  CHECK(std::abs(mean - 40) <= 1e-9 * 40 + std::abs(m.saddle->residual));
  CHECK_FALSE(TiltedModel::at_sigma(ParameterFunction::power_law(2), 40, 0.1).saddle);
}

TEST_CASE("single Poisson") {
  const auto d = y_distribution<double>(single(), 20);
  for (int k = 0; k <= 20; ++k) CHECK(d.pmf[k] == doctest::Approx(std::exp(-1.0) / std::tgamma(k + 1.0)).epsilon(1e-14));
  CHECK(d.pmf[1] == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(d.deficit >= 0);
  CHECK(d.deficit < 1e-18);
  CHECK_THROWS_AS(y_distribution<double>(single(), kMaxConvolutionTop + 1), Error);
}

TEST_CASE("convolution matches the compound-Poisson recursion") {
  for (const auto& f : {ParameterFunction::power_law(1), ParameterFunction::power_law(3), ParameterFunction::ewens(2)}) {
    const auto m = TiltedModel::at_saddle(f, 60);
    const auto d = y_distribution<double>(m, 90);
    std::vector<long double> lam(m.lambdas.begin(), m.lambdas.end());
    // the recursion needs lambdas for every l <= top; X_l for l > n is absent
    const auto ref = oracle::compound_poisson_pmf(lam, 90);
    for (int j = 0; j <= 90; ++j) {
      CHECK(d.pmf[j] == doctest::Approx(static_cast<double>(ref[static_cast<std::size_t>(j)])).epsilon(1e-12));
    }
  }
}

TEST_CASE("ewens(1) at sigma 0 gives Pr(Y = n) = exp(-H_n)") {
  for (int n = 1; n <= 60; ++n) {
    const auto m = TiltedModel::at_sigma(ParameterFunction::ewens(1), n, 0.0);
    const auto d = y_distribution<double>(m, n);
    CHECK(d.pmf[n] == doctest::Approx(std::exp(-oracle::harmonic(n))).epsilon(1e-12));
  }
}

TEST_CASE("Khintchine identity at several tilts") {
  const std::vector<ParameterFunction> fams = {ParameterFunction::ewens(1), ParameterFunction::ewens(2),
                                               ParameterFunction::power_law(1), ParameterFunction::power_law(2),
                                               ParameterFunction::power_law(3)};
  WorkingPrecision wp(160);
  for (const auto& f : fams) {
    const auto seq = compute_cn(f, 60, SeqMode::rational());
    for (double sigma : {-0.5, 0.0, 0.3}) {
      for (int n : {1, 2, 5, 17, 40, 60}) {
        const auto m = TiltedModel::at_sigma(f, n, sigma);
        const auto d = y_distribution<Float>(m, n);
        const Float s(sigma);
        const Float lhs = exp(Float(n) * s + tilt_sum(f, n, s, 0)) * d.pmf[n];
        const Float c = Float(seq.c_exact(n));
        CHECK(to_double(abs(lhs - c) / c) <= 1e-10);
      }
    }
  }
}

TEST_CASE("power_law(1), n = 2 at the saddle") {
  const auto m = TiltedModel::at_saddle(ParameterFunction::power_law(1), 2);
  const double s = m.saddle->sigma_n;
  const double S = std::exp(-s) + std::exp(-2 * s);
  const auto d = y_distribution<double>(m, 2);
  CHECK(d.pmf[2] == doctest::Approx(1.5 * std::exp(-2 * s - S)).epsilon(1e-10));
}

TEST_CASE("characteristic function") {
  const auto m1 = single();
  CHECK(std::abs(char_fn(m1, 0.0) - std::complex<double>(1, 0)) < 1e-15);
  CHECK(std::abs(char_fn(m1, 0.5) - std::exp(-2.0)) < 1e-15);
  const auto m = TiltedModel::at_saddle(ParameterFunction::power_law(2), 80);
  CHECK(std::abs(char_fn(m, 1.0) - 1.0) < 1e-12);
  CHECK(std::abs(char_fn(m, 3.0) - 1.0) < 1e-12);
  for (int i = 1; i < 400; ++i) {
    const double a = i / 400.0;
    const auto phi = char_fn(m, a);
    CHECK(std::abs(phi) < 1.0);
    CHECK(std::abs(char_fn(m, -a) - std::conj(phi)) < 1e-13);
    // direct product of the Poisson factors exp(lambda (e^{2 pi i a l} - 1))
    std::complex<double> direct = 1;
    double log_mod = 0;
    for (int l = 1; l <= 80; ++l) {
      const double lam = m.lambda(l);
      direct *= std::exp(lam * (std::polar(1.0, 2 * kPi * a * l) - 1.0));
      log_mod -= 2 * lam * std::pow(std::sin(kPi * a * l), 2);
    }
    CHECK(std::abs(phi - direct) < 1e-12);
    CHECK(std::abs(std::exp(log_mod) - std::abs(phi)) < 1e-12);
    CHECK(-std::log(std::abs(phi)) >= 8 * v_n_alpha(m, a) - 1e-12);
  }
}

TEST_CASE("V_n") {
  const auto m = TiltedModel::at_saddle(ParameterFunction::power_law(1), 100);
  CHECK(v_n_alpha(m, 0.0) == 0.0);
  CHECK(v_n_alpha(m, 2.0) == 0.0);
  CHECK(v_n_alpha(single(), 0.5) == doctest::Approx(0.25));
}

TEST_CASE("trapezoid inversion matches the convolution") {
  for (const auto& f : {ParameterFunction::power_law(1), ParameterFunction::ewens(1)}) {
    for (int n : {1, 2, 10, 50, 100, 200}) {
      const auto m = TiltedModel::at_saddle(f, n);
      const auto d = y_distribution<double>(m, n + 5);
      for (int t : {n - 1, n, n + 5}) {
        if (t < 0) continue;
        const auto q = integral_T(m, t);
        CHECK(std::abs(q.value - d.pmf[t]) <= 1e-10);
        CHECK(q.imag_residual < 1e-12);
        CHECK(q.tail_bound < 1e-12);
      }
    }
  }
  const auto q = integral_T(single(), 1, 64);
  CHECK(std::abs(q.value - std::exp(-1.0)) < 1e-12);
  CHECK(q.nodes == 64);
  CHECK_THROWS_AS(integral_T(TiltedModel::at_saddle(ParameterFunction::power_law(1), 100), 100, 64), Error);
}

TEST_CASE("trapezoid inversion against the exact sequence at n = 500") {
  const auto f = ParameterFunction::power_law(1);
  const auto m = TiltedModel::at_saddle(f, 500);
  const auto seq = compute_cn(f, 500);
  const double pr = std::exp(seq.log_c_double(500) - 500 * m.saddle->sigma_n - m.saddle->S_n_at_tilt);
  CHECK(integral_T(m, 500).value == doctest::Approx(pr).epsilon(1e-9));
}

TEST_CASE("T1 / T2 split") {
  for (int p : {1, 2}) {
    const auto m = TiltedModel::at_saddle(ParameterFunction::power_law(p), 2000);
    const auto s = split_T(m, p);
    CHECK_FALSE(s.degenerate);
    CHECK(s.alpha0 == doctest::Approx(std::log(2000.0) / std::sqrt(m.saddle->B_n2)));
    const double scaled = s.T1 * std::sqrt(2 * kPi * m.saddle->B_n2);
    CHECK(scaled >= 0.9);
    CHECK(scaled <= 1.1);
    CHECK(s.T2_grid_max / s.T1 < 1e-3);
    CHECK(s.lemma7_holds);
    CHECK(s.T2_grid_max <= std::exp(-8 * s.v_min) * (1 + 1e-12));
  }
  // tiny n: alpha0 capped at 1/2
  const auto tiny = TiltedModel::at_saddle(ParameterFunction::table({1, Rational(1, 1000), Rational(1, 1000)}), 3);
  const auto s = split_T(tiny, 1);
  CHECK(s.degenerate);
  CHECK(s.alpha0 == 0.5);
}

TEST_CASE("V_n lower bound scales like log^2 n") {
  std::vector<double> gammas;
  for (int n : {500, 1000, 2000}) {
    const auto s = split_T(TiltedModel::at_saddle(ParameterFunction::power_law(1), n), 1);
    CHECK(s.gamma_fit > 0);
    gammas.push_back(s.gamma_fit);
  }
  const auto [lo, hi] = std::minmax_element(gammas.begin(), gammas.end());
  CHECK(*hi / *lo < 2.0);
}

TEST_CASE("local limit ratios") {
  const auto m1 = TiltedModel::at_saddle(ParameterFunction::power_law(1), 1);
  CHECK(llt_ratio(m1) == doctest::Approx(std::exp(-1.0) * std::sqrt(2 * kPi)).epsilon(1e-12));
  CHECK(lyapunov_ratio(m1) == doctest::Approx(1.0));
  const auto f = ParameterFunction::power_law(1);
  double prev = INFINITY, prev_lyap = INFINITY, prev_shift = INFINITY;
  for (int n : {250, 500, 1000, 2000}) {
    const auto m = TiltedModel::at_saddle(f, n);
    const double r = llt_ratio(m);
    CHECK(shifted_ratio(m, 0) == r);
    CHECK(std::abs(r - 1) < prev);
    prev = std::abs(r - 1);
    const double sh = shifted_ratio(m, 1);
    CHECK(std::abs(sh - 1) < prev_shift);
    prev_shift = std::abs(sh - 1);
    CHECK(lyapunov_ratio(m) < prev_lyap);
    prev_lyap = lyapunov_ratio(m);
    if (n == 2000) CHECK(std::abs(shifted_ratio(m, -1) / r - 1) < 0.02);
  }
}

TEST_CASE("ewens(1) negative control") {
  const int n = 400;
  const auto m = TiltedModel::at_saddle(ParameterFunction::ewens(1), n);
  CHECK(m.saddle->B_n2 == doctest::Approx(n * (n + 1) / 2.0));
  const double expected = std::exp(-oracle::harmonic(n)) * std::sqrt(2 * kPi * n * (n + 1) / 2.0);
  CHECK(llt_ratio(m) == doctest::Approx(expected).epsilon(1e-10));
  // e^{-H_n} sqrt(pi n^2) -> e^{-gamma} sqrt(pi), not 1
  CHECK(llt_ratio(m) == doctest::Approx(std::exp(-std::numbers::egamma) * std::sqrt(kPi)).epsilon(0.01));
}

TEST_CASE("mean bookkeeping of the truncated convolution") {
  const auto m = TiltedModel::at_saddle(ParameterFunction::power_law(2), 100);
  const int top = 400;
  const auto d = y_distribution<double>(m, top);
  double mean = 0;
  for (int j = 0; j <= top; ++j) mean += j * d.pmf[j];
  CHECK(std::abs(mean - 100) < 1e-6);
  CHECK(d.deficit < 1e-9);
}
