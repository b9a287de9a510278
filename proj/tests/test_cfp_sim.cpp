#include "cfp/cfp_sim.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace cfp;

namespace {

double rate_of(const std::vector<MoveRate>& rates, Move::Type type, int i, int j) {
  for (const auto& r : rates) {
    if (r.move == Move{type, i, j}) return r.rate.value;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("canonical kernel") {
  const auto k = canonical_kernel(ParameterFunction::ewens(1), 6);
  CHECK(*k.psi(1, 1).exact == Rational(1, 2));
  CHECK(*k.phi(1, 1).exact == 1);
  CHECK(k.psi(2, 1).value == k.psi(1, 2).value);
  const auto p = canonical_kernel(ParameterFunction::power_law(1), 6);
  for (int i = 1; i <= 6; ++i) {
    for (int j = i; i + j <= 6; ++j) {
      CHECK(p.psi(i, j).value == 1.0);
      CHECK(p.phi(i, j).value == 1.0);
    }
  }
  CHECK(k.ratio_violation(ParameterFunction::ewens(1)) < 1e-15);
  CHECK_THROWS_AS(k.psi(3, 4), Error);
}

TEST_CASE("state rates follow the counting conventions") {
  const auto f = ParameterFunction::ewens(1);
  const auto k = canonical_kernel(f, 6);
  const auto singles = state_rates(Partition(6, {{1, 6}}), k);
  REQUIRE(singles.size() == 1);
  CHECK(singles[0].move.type == Move::Type::coagulation);
  CHECK(singles[0].rate.value == doctest::Approx(0.5 * 15));
  for (const auto& r : state_rates(Partition(6, {{6, 1}}), k)) CHECK(r.move.type == Move::Type::fragmentation);
  CHECK(state_rates(Partition(6, {{6, 1}}), k).size() == 3);

  const auto k4 = canonical_kernel(f, 4);
  const auto twos = state_rates(Partition(4, {{2, 2}}), k4);
  CHECK(rate_of(twos, Move::Type::coagulation, 2, 2) == doctest::Approx(0.25));
  CHECK(rate_of(twos, Move::Type::fragmentation, 1, 1) == doctest::Approx(1.0));
  const auto mixed = state_rates(Partition(5, {{2, 1}, {3, 1}}), canonical_kernel(f, 5));
  CHECK(rate_of(mixed, Move::Type::coagulation, 2, 3) == doctest::Approx(0.2));
  CHECK(rate_of(mixed, Move::Type::fragmentation, 1, 2) == doctest::Approx(0.5));
  CHECK(state_rates(Partition(1, {{1, 1}}), canonical_kernel(f, 1)).empty());
}

TEST_CASE("moves conserve mass") {
  const Partition eta(7, {{1, 2}, {2, 1}, {3, 1}});
  CHECK(apply_move(eta, {Move::Type::coagulation, 1, 3}) == Partition(7, {{1, 1}, {2, 1}, {4, 1}}));
  CHECK(apply_move(eta, {Move::Type::fragmentation, 1, 2}) == Partition(7, {{1, 3}, {2, 2}}));
  CHECK_THROWS_AS(apply_move(eta, {Move::Type::coagulation, 2, 2}), Error);
}

TEST_CASE("detailed balance is exact for the canonical kernel") {
  for (const auto& f : {ParameterFunction::ewens(1), ParameterFunction::power_law(1)}) {
    for (int N = 2; N <= 12; ++N) {
      const auto rep = detailed_balance_check(f, N, canonical_kernel(f, N));
      REQUIRE(rep.max_violation_exact);
      CHECK(*rep.max_violation_exact == 0);
      CHECK(rep.transitions_checked > 0);
    }
  }
}

TEST_CASE("perturbed kernel breaks detailed balance") {
  const auto f = ParameterFunction::power_law(1);
  auto k = canonical_kernel(f, 6);
  k.scale_psi(1, 2, Rational(101, 100));
  const auto rep = detailed_balance_check(f, 6, k);
  CHECK(*rep.max_violation_exact > 0);
  CHECK(k.ratio_violation(f) == doctest::Approx(0.01));
  SimulationOptions opt;
  opt.event_cap = 10;
  CHECK_THROWS_AS(simulate(f, 6, k, opt), Error);
}

TEST_CASE("a rescaled kernel with the same ratio is accepted") {
  const auto f = ParameterFunction::ewens(2);
  const RateKernel k(
      5, [&](int i, int j) { return Rate{3 * f.a(i + j), 3 * f.a_exact(i + j)}; },
      [&](int i, int j) { return Rate{3 * f.a(i) * f.a(j), 3 * f.a_exact(i) * f.a_exact(j)}; });
  CHECK(*detailed_balance_check(f, 5, k).max_violation_exact == 0);
}

TEST_CASE("simulation bookkeeping") {
  const auto f = ParameterFunction::power_law(1);
  const auto k = canonical_kernel(f, 6);
  SimulationOptions opt;
  opt.event_cap = 5000;
  opt.seed = 11;
  const auto a = simulate(f, 6, k, opt);
  CHECK(a.event_count == 5000);
  CHECK(a.events.size() == 5000);
  Partition state = a.initial;
  double t = 0;
  for (const auto& ev : a.events) {
    CHECK(ev.time >= t);
    t = ev.time;
    state = apply_move(state, ev.move);
    int mass = 0;
    for (auto [size, m] : state.parts()) mass += size * m;
    CHECK(mass == 6);
  }
  CHECK(state == a.final_state);
  double occ = 0;
  for (const auto& [s, time] : a.occupation) occ += time;
  CHECK(occ == doctest::Approx(a.total_time).epsilon(1e-12));

  const auto b = simulate(f, 6, k, opt);
  CHECK(a.events.size() == b.events.size());
  CHECK(a.final_state == b.final_state);
  CHECK(a.total_time == b.total_time);

  opt.t_max = 0;
  CHECK_THROWS_AS(simulate(f, 6, k, opt), Error);
}

TEST_CASE("N = 1 never moves") {
  const auto f = ParameterFunction::power_law(1);
  SimulationOptions opt;
  opt.t_max = 10;
  const auto traj = simulate(f, 1, canonical_kernel(f, 1), opt);
  CHECK(traj.event_count == 0);
  CHECK(traj.occupation.at(Partition(1, {{1, 1}})) == 10.0);
}

TEST_CASE("relaxation time, two-state case") {
  // N = 2: rates a_2 (merge) and a_1^2 / 2 (split); gap is their sum
  const auto f = ParameterFunction::ewens(3);
  const double gap = f.a(2) + f.a(1) * f.a(1) / 2;
  CHECK(relaxation_time(f, 2, canonical_kernel(f, 2)) == doctest::Approx(1 / gap).epsilon(1e-12));
  CHECK(relaxation_time(f, 6, canonical_kernel(f, 6)) > 0);
}

TEST_CASE("occupation measure approaches mu_N") {
  const auto f = ParameterFunction::ewens(1);
  const auto k = canonical_kernel(f, 6);
  SimulationOptions shorter;
  shorter.event_cap = 10000;
  shorter.seed = 3;
  shorter.record_events = false;
  SimulationOptions longer = shorter;
  longer.event_cap = 1000000;
  const double tv_short = total_variation(simulate(f, 6, k, shorter), f, 6);
  const double tv_long = total_variation(simulate(f, 6, k, longer), f, 6);
  CHECK(tv_long < tv_short);
  CHECK(tv_long < 0.01);
}

TEST_CASE("occupation summary and thinned samples") {
  const auto f = ParameterFunction::power_law(1);
  const auto k = canonical_kernel(f, 5);
  SimulationOptions opt;
  opt.event_cap = 200000;
  opt.seed = 8;
  const auto traj = simulate(f, 5, k, opt);
  const auto rows = occupation_summary(traj, f, 5);
  CHECK(rows.size() == 7);
  for (const auto& r : rows) {
    CHECK(std::abs(r.fraction - r.mu) < 0.02);
    CHECK(std::abs(r.z_score) < 5);
  }
  const double spacing = 5 * relaxation_time(f, 5, k);
  const auto path = sample_path(traj, spacing, spacing);
  CHECK(path.size() > 1000);
  const auto mu = mu_exact(5, f);
  std::vector<double> obs(mu.size(), 0.0), probs;
  for (const auto& e : mu) probs.push_back(to_double(e.prob.value));
  for (const auto& s : path) {
    for (std::size_t i = 0; i < mu.size(); ++i) {
      if (mu[i].state == s) obs[i] += 1;
    }
  }
  CHECK(oracle::pearson(obs, probs) < oracle::chi2_quantile(6, 0.999));
}
