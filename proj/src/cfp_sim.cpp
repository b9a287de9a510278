#include "cfp/cfp_sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace cfp {

namespace {

Rate times(const Rate& r, long long factor, bool halve) {
  Rate out;
  out.value = r.value * static_cast<double>(factor) / (halve ? 2.0 : 1.0);
  if (r.exact) out.exact = *r.exact * factor / (halve ? 2 : 1);
  return out;
}

Rate move_rate(const Partition& eta, const Move& mv, const RateKernel& kernel) {
  const long long ni = eta.count(mv.i);
  const long long nj = eta.count(mv.j);
  if (mv.type == Move::Type::coagulation) {
    if (mv.i == mv.j) return times(kernel.psi(mv.i, mv.i), ni * (ni - 1), true);
    return times(kernel.psi(mv.i, mv.j), ni * nj, false);
  }
  const long long ns = eta.count(mv.i + mv.j);
  return times(kernel.phi(mv.i, mv.j), ns, mv.i == mv.j);
}

Move reverse(const Move& mv) {
  return {mv.type == Move::Type::coagulation ? Move::Type::fragmentation : Move::Type::coagulation, mv.i, mv.j};
}

}  // namespace

RateKernel::RateKernel(int N, const Fn& psi, const Fn& phi) : N_(N) {
  if (N < 1) throw Error(ErrorCode::invalid_argument, "kernel needs N >= 1");
  const auto size = static_cast<std::size_t>(N + 1) * static_cast<std::size_t>(N + 1);
  psi_.resize(size);
  phi_.resize(size);
  for (int i = 1; i <= N; ++i) {
    for (int j = i; i + j <= N; ++j) {
      Rate p = psi(i, j);
      Rate q = phi(i, j);
      if (!(p.value > 0.0) || !(q.value > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "kernel rates must be positive at (" + std::to_string(i) + ", " +
                                                     std::to_string(j) + ")");
      }
      exact_ = exact_ && p.exact && q.exact;
      psi_[index(i, j)] = std::move(p);
      phi_[index(i, j)] = std::move(q);
    }
  }
}

std::size_t RateKernel::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 1 || i + j > N_) {
    throw Error(ErrorCode::out_of_range, "kernel index (" + std::to_string(i) + ", " + std::to_string(j) +
                                             ") outside 2 <= i + j <= " + std::to_string(N_));
  }
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(N_ + 1) + static_cast<std::size_t>(j);
}

const Rate& RateKernel::psi(int i, int j) const { return psi_[index(i, j)]; }
const Rate& RateKernel::phi(int i, int j) const { return phi_[index(i, j)]; }

void RateKernel::scale_psi(int i, int j, const Number& factor) {
  Rate& r = psi_[index(i, j)];
  r.value *= factor.value();
  if (r.exact && factor.is_exact()) {
    *r.exact *= factor.exact();
  } else {
    r.exact.reset();
    exact_ = false;
  }
}

double RateKernel::ratio_violation(const ParameterFunction& f) const {
  double worst = 0.0;
  for (int i = 1; i <= N_; ++i) {
    for (int j = i; i + j <= N_; ++j) {
      const double target = std::exp(f.log_a(i + j) - f.log_a(i) - f.log_a(j));
      const double ratio = psi(i, j).value / phi(i, j).value;
      worst = std::max(worst, std::abs(ratio - target) / target);
    }
  }
  return worst;
}

RateKernel canonical_kernel(const ParameterFunction& f, int N) {
  const bool exact = f.has_exact();
  auto psi = [&](int i, int j) {
    Rate r{f.a(i + j), std::nullopt};
    if (exact) r.exact = f.a_exact(i + j);
    return r;
  };
  auto phi = [&](int i, int j) {
    Rate r{f.a(i) * f.a(j), std::nullopt};
    if (exact) r.exact = f.a_exact(i) * f.a_exact(j);
    return r;
  };
  return RateKernel(N, psi, phi);
}

std::vector<MoveRate> state_rates(const Partition& eta, const RateKernel& kernel) {
  std::vector<MoveRate> out;
  const auto& parts = eta.parts();
  for (std::size_t a = 0; a < parts.size(); ++a) {
    for (std::size_t b = a; b < parts.size(); ++b) {
      Move mv{Move::Type::coagulation, parts[a].first, parts[b].first};
      if (mv.i == mv.j && parts[a].second < 2) continue;
      out.push_back({mv, move_rate(eta, mv, kernel)});
    }
  }
  for (auto [size, mult] : parts) {
    for (int i = 1; 2 * i <= size; ++i) {
      Move mv{Move::Type::fragmentation, i, size - i};
      out.push_back({mv, move_rate(eta, mv, kernel)});
    }
  }
  return out;
}

Partition apply_move(const Partition& eta, const Move& mv) {
  std::vector<int> counts = eta.counts();
  auto at = [&](int k) -> int& { return counts.at(static_cast<std::size_t>(k - 1)); };
  if (mv.type == Move::Type::coagulation) {
    --at(mv.i);
    --at(mv.j);
    ++at(mv.i + mv.j);
  } else {
    --at(mv.i + mv.j);
    ++at(mv.i);
    ++at(mv.j);
  }
  if (std::any_of(counts.begin(), counts.end(), [](int c) { return c < 0; })) {
    throw Error(ErrorCode::invalid_argument, "move not available from state " + eta.to_string());
  }
  return Partition::from_counts(counts);
}

BalanceReport detailed_balance_check(const ParameterFunction& f, int N, const RateKernel& kernel, int cap) {
  if (kernel.N() < N) throw Error(ErrorCode::invalid_argument, "kernel tabulated for smaller N");
  const auto measure = mu_exact(N, f, cap);
  const bool exact = f.has_exact() && kernel.has_exact();
  std::unordered_map<Partition, std::size_t, PartitionHash> where;
  for (std::size_t s = 0; s < measure.size(); ++s) where.emplace(measure[s].state, s);

  BalanceReport report;
  if (exact) report.max_violation_exact = Rational(0);
  for (const auto& entry : measure) {
    for (const auto& [mv, rate] : state_rates(entry.state, kernel)) {
      const Partition next = apply_move(entry.state, mv);
      const auto& other = measure[where.at(next)];
      const Rate back = move_rate(next, reverse(mv), kernel);
      ++report.transitions_checked;
      if (exact) {
        Rational forward = *entry.prob.exact * *rate.exact;
        Rational backward = *other.prob.exact * *back.exact;
        Rational diff = forward - backward;
        if (diff < 0) diff = -diff;
        Rational v = diff / std::max(forward, backward);
        if (v > *report.max_violation_exact) report.max_violation_exact = v;
      } else {
        const double forward = to_double(entry.prob.value) * rate.value;
        const double backward = to_double(other.prob.value) * back.value;
        report.max_violation =
            std::max(report.max_violation, std::abs(forward - backward) / std::max(forward, backward));
      }
    }
  }
  if (exact) report.max_violation = report.max_violation_exact->convert_to<double>();
  return report;
}

Trajectory simulate(const ParameterFunction& f, int N, const RateKernel& kernel, const SimulationOptions& options,
                    std::optional<Partition> initial) {
  if (!(options.t_max > 0.0)) throw Error(ErrorCode::invalid_argument, "time horizon must be positive");
  if (!std::isfinite(options.t_max) && options.event_cap == 0) {
    throw Error(ErrorCode::invalid_argument, "need a finite t_max or an event cap");
  }
  if (kernel.N() < N) throw Error(ErrorCode::invalid_argument, "kernel tabulated for smaller N");
  if (double v = kernel.ratio_violation(f); v > 1e-12) {
    throw Error(ErrorCode::invalid_argument,
                "kernel violates psi/phi = a_{i+j}/(a_i a_j) (relative deviation " + format_real(v) + ")");
  }
  Partition state = initial ? *initial : Partition(N, {{1, N}});
  if (state.N() != N) throw Error(ErrorCode::invalid_argument, "initial state is not a partition of N");

  Trajectory traj;
  traj.initial = state;
  std::mt19937_64 rng(mix_seed(options.seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = 0.0;
  while (options.event_cap == 0 || traj.event_count < options.event_cap) {
    const auto moves = state_rates(state, kernel);
    double total = 0.0;
    for (const auto& m : moves) total += m.rate.value;
    if (moves.empty()) {
      // Only N = 1 has no transitions; hold until the horizon.
      if (std::isfinite(options.t_max)) {
        traj.occupation[state] += options.t_max - t;
        t = options.t_max;
      }
      break;
    }
    const double hold = std::exponential_distribution<double>(total)(rng);
    if (t + hold >= options.t_max) {
      traj.occupation[state] += options.t_max - t;
      t = options.t_max;
      break;
    }
    traj.occupation[state] += hold;
    t += hold;
    double pick = unit(rng) * total;
    std::size_t chosen = moves.size() - 1;
    for (std::size_t k = 0; k < moves.size(); ++k) {
      pick -= moves[k].rate.value;
      if (pick < 0.0) {
        chosen = k;
        break;
      }
    }
    state = apply_move(state, moves[chosen].move);
    ++traj.event_count;
    if (options.record_events) traj.events.push_back({t, moves[chosen].move});
  }
  traj.total_time = t;
  traj.final_state = state;
  return traj;
}

std::vector<Partition> sample_path(const Trajectory& traj, double spacing, double burn_in) {
  if (!(spacing > 0.0)) throw Error(ErrorCode::invalid_argument, "spacing must be positive");
  if (traj.event_count > 0 && traj.events.size() != traj.event_count) {
    throw Error(ErrorCode::invalid_argument, "trajectory was simulated without an event log");
  }
  std::vector<Partition> out;
  Partition state = traj.initial;
  std::size_t next_event = 0;
  for (double t = burn_in; t < traj.total_time; t += spacing) {
    while (next_event < traj.events.size() && traj.events[next_event].time <= t) {
      state = apply_move(state, traj.events[next_event].move);
      ++next_event;
    }
    out.push_back(state);
  }
  return out;
}

double relaxation_time(const ParameterFunction& f, int N, const RateKernel& kernel, int cap) {
  const auto measure = mu_exact(N, f, cap);
  const auto size = static_cast<Eigen::Index>(measure.size());
  if (size < 2) return 0.0;
  std::unordered_map<Partition, Eigen::Index, PartitionHash> where;
  for (Eigen::Index s = 0; s < size; ++s) where.emplace(measure[static_cast<std::size_t>(s)].state, s);
  Eigen::VectorXd sqrt_mu(size);
  for (Eigen::Index s = 0; s < size; ++s) sqrt_mu(s) = std::sqrt(to_double(measure[static_cast<std::size_t>(s)].prob.value));

  // D^{1/2} Q D^{-1/2} is symmetric for a reversible generator Q.
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index a = 0; a < size; ++a) {
    for (const auto& [mv, rate] : state_rates(measure[static_cast<std::size_t>(a)].state, kernel)) {
      const Eigen::Index b = where.at(apply_move(measure[static_cast<std::size_t>(a)].state, mv));
      sym(a, b) += sqrt_mu(a) * rate.value / sqrt_mu(b);
      sym(a, a) -= rate.value;
    }
  }
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  const double gap = -solver.eigenvalues()(size - 2);
  return 1.0 / gap;
}

std::vector<OccupationRow> occupation_summary(const Trajectory& traj, const ParameterFunction& f, int N,
                                              int batches) {
  const auto measure = mu_exact(N, f);
  std::unordered_map<Partition, std::size_t, PartitionHash> where;
  std::vector<OccupationRow> rows;
  for (const auto& e : measure) {
    where.emplace(e.state, rows.size());
    OccupationRow row;
    row.state = e.state;
    row.mu = to_double(e.prob.value);
    rows.push_back(std::move(row));
  }
  const double T = traj.total_time;
  for (const auto& [state, time] : traj.occupation) {
    auto& row = rows[where.at(state)];
    row.occupation_time = time;
    row.fraction = T > 0.0 ? time / T : 0.0;
  }

  const bool have_log = traj.events.size() == traj.event_count;
  if (!have_log || batches < 2 || !(T > 0.0)) {
    for (auto& row : rows) row.z_score = std::numeric_limits<double>::quiet_NaN();
    return rows;
  }
  // Batch means over equal time windows.
  const double width = T / batches;
  std::vector<std::vector<double>> per_batch(rows.size(), std::vector<double>(static_cast<std::size_t>(batches), 0.0));
  auto credit = [&](const Partition& s, double t0, double t1) {
    auto& slots = per_batch[where.at(s)];
    while (t0 < t1) {
      const int b = std::min(batches - 1, static_cast<int>(t0 / width));
      const double edge = std::min(t1, (b + 1) * width);
      slots[static_cast<std::size_t>(b)] += edge - t0;
      if (edge <= t0) break;
      t0 = edge;
    }
  };
  Partition state = traj.initial;
  double t = 0.0;
  for (const auto& ev : traj.events) {
    credit(state, t, ev.time);
    state = apply_move(state, ev.move);
    t = ev.time;
  }
  credit(state, t, T);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double mean = 0.0;
    for (double v : per_batch[r]) mean += v / width;
    mean /= batches;
    double var = 0.0;
    for (double v : per_batch[r]) var += (v / width - mean) * (v / width - mean);
    var /= (batches - 1);
    const double se = std::sqrt(var / batches);
    rows[r].z_score = se > 0.0 ? (mean - rows[r].mu) / se : (mean == rows[r].mu ? 0.0 : std::copysign(INFINITY, mean - rows[r].mu));
  }
  return rows;
}

double total_variation(const Trajectory& traj, const ParameterFunction& f, int N) {
  double tv = 0.0;
  for (const auto& row : occupation_summary(traj, f, N, 0)) tv += std::abs(row.fraction - row.mu);
  return 0.5 * tv;
}

}  // namespace cfp
