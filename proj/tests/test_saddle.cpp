#include "cfp/saddle.hpp"

#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

using namespace cfp;

TEST_CASE("tilt_sum closed forms") {
  const auto e = ParameterFunction::ewens(1);
  for (int n : {1, 7, 100, 1000}) {
    CHECK(tilt_sum(e, n, 0.0, 2) == doctest::Approx(n * (n + 1) / 2.0).epsilon(1e-15));
    CHECK(tilt_sum(e, n, 0.0, 3) == doctest::Approx(n * (n + 1.0) * (2 * n + 1) / 6.0).epsilon(1e-15));
    CHECK(tilt_sum(e, n, 0.0, 1) == n);
  }
  CHECK(tilt_sum(ParameterFunction::power_law(1), 1, 0.0, 1) == 1.0);
  // geometric: sum_{l<=n} x^l with x = e^{-s}
  const double s = 0.37, x = std::exp(-s);
  CHECK(tilt_sum(ParameterFunction::power_law(1), 50, s, 0) ==
        doctest::Approx(x * (1 - std::pow(x, 50)) / (1 - x)).epsilon(1e-14));
  WorkingPrecision wp(128);
  CHECK(to_double(tilt_sum(ParameterFunction::power_law(2), 300, Float(s), 2)) ==
        doctest::Approx(tilt_sum(ParameterFunction::power_law(2), 300, s, 2)).epsilon(1e-14));
}

TEST_CASE("tilt_sum is strictly decreasing in sigma") {
  for (const auto& f : {ParameterFunction::power_law(1), ParameterFunction::ewens(Rational(1, 2)),
                        ParameterFunction::power_law(3)}) {
    double prev = INFINITY;
    for (double s = -0.3; s <= 2.0; s += 0.01) {
      const double v = tilt_sum(f, 200, s, 1);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("solve_sigma special cases") {
  for (int n : {1, 2, 10, 1000}) {
    const auto sp = solve_sigma(ParameterFunction::ewens(1), n);
    CHECK(sp.sigma_n == 0.0);
    CHECK(sp.residual == 0.0);
  }
  CHECK(std::abs(solve_sigma(ParameterFunction::power_law(1), 1).sigma_n) < 1e-14);
  // 2x^2 + x - 2 = 0
  const double x = (-1.0 + std::sqrt(17.0)) / 4.0;
  CHECK(solve_sigma(ParameterFunction::power_law(1), 2).sigma_n == doctest::Approx(-std::log(x)).epsilon(1e-13));
  CHECK(-std::log(x) == doctest::Approx(0.24747).epsilon(1e-4));
}

TEST_CASE("saddle invariants") {
  for (int p : {1, 2, 3}) {
    const auto f = ParameterFunction::power_law(p);
    for (int n : {1, 3, 10, 100, 1000, 10000}) {
      const auto sp = solve_sigma(f, n);
      CHECK(std::abs(tilt_sum(f, n, sp.sigma_n, 1) - n) <= std::max(1e-9 * n, 1e-12));
      CHECK(std::abs(sp.residual) <= std::max(1e-9 * n, 1e-12));
      CHECK(sp.B_n2 > 0);
      CHECK(sp.rho_3 > 0);
      CHECK(sp.S_n_at_tilt == doctest::Approx(tilt_sum(f, n, sp.sigma_n, 0)));
    }
  }
  CHECK_THROWS_AS(solve_sigma(ParameterFunction::power_law(1), 0), Error);
  CHECK_THROWS_AS(solve_sigma(ParameterFunction::power_law(1), 5, 0.0), Error);
}

TEST_CASE("tolerance refinement moves sigma within the implied bound") {
  const auto f = ParameterFunction::power_law(2);
  for (int n : {50, 500, 5000}) {
    const double tol = 1e-8;
    const auto a = solve_sigma(f, n, tol);
    const auto b = solve_sigma(f, n, tol / 10);
    // d/dsigma M_n = -B_n^2
    CHECK(std::abs(a.sigma_n - b.sigma_n) <= 10 * tol * n / b.B_n2);
  }
}

TEST_CASE("sign behaviour") {
  for (int n = 2; n <= 1000; n += 7) {
    CHECK(solve_sigma(ParameterFunction::power_law(1), n).sigma_n > 0);
    CHECK(solve_sigma(ParameterFunction::power_law(Number::inexact(0.5)), n).sigma_n > 0);
  }
  for (int n : {50, 200, 1000}) CHECK(solve_sigma(ParameterFunction::ewens(Rational(1, 2)), n).sigma_n < 0);
}

TEST_CASE("order bounds: n^{1/(p+1)} sigma_n stays in a fixed band") {
  for (int p : {1, 2}) {
    const auto f = ParameterFunction::power_law(p);
    double lo = INFINITY, hi = 0;
    for (int n = 125; n <= 64000; n *= 2) {
      const double v = std::pow(n, 1.0 / (p + 1)) * solve_sigma(f, n).sigma_n;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo > 0.5);
    CHECK(hi / lo < 1.5);
  }
}

TEST_CASE("sigma trend") {
  for (const auto& row : sigma_trend(ParameterFunction::ewens(1), {3, 30, 300})) {
    CHECK(row.sigma_n == 0.0);
    CHECK_FALSE(row.normalized);
  }
  const auto p1 = sigma_trend(ParameterFunction::power_law(1), {100000});
  REQUIRE(p1[0].normalized);
  CHECK(*p1[0].normalized == doctest::Approx(1.0).epsilon(0.01));
  const auto p2 = sigma_trend(ParameterFunction::power_law(2), {100000});
  CHECK(*p2[0].normalized == doctest::Approx(std::cbrt(2.0)).epsilon(0.02));
  CHECK_THROWS_AS(sigma_trend(ParameterFunction::power_law(1), {10, 5}), Error);
}

TEST_CASE("gamma sum diagnostic") {
  {
    const double s = 0.01;
    const auto d = gamma_sum_diagnostic(0, s, 10000);
    CHECK(d.finite_sum == doctest::Approx(std::exp(-s) / (1 - std::exp(-s))).epsilon(1e-12));
    CHECK(d.gamma_asymptote == doctest::Approx(100.0));
    CHECK(d.ratio == doctest::Approx(0.995).epsilon(1e-3));
  }
  {
    const double s = 0.02, x = std::exp(-s);
    const auto d = gamma_sum_diagnostic(1, s, 10000);
    CHECK(d.finite_sum == doctest::Approx(x / ((1 - x) * (1 - x))).epsilon(1e-12));
    CHECK(std::abs(d.ratio - 1) < 0.02);
  }
  {
    const double s = 0.005;
    boost::math::quadrature::tanh_sinh<double> q;
    const double integral = q.integrate([&](double u) { return std::sqrt(u) * std::exp(-s * u); }, 0.0, INFINITY);
    const auto d = gamma_sum_diagnostic(0.5, s, 10000);
    CHECK(d.gamma_asymptote == doctest::Approx(integral).epsilon(1e-9));
    CHECK(std::abs(d.ratio - 1) < 0.01);
  }
  CHECK_THROWS_AS(gamma_sum_diagnostic(1, 0.001, 100), Error);
}
