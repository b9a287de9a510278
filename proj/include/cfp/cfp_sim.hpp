// Continuous-time coagulation-fragmentation process on the partitions of N,
// with rate kernels whose ratio psi/phi is a_{i+j} / (a_i a_j).
//
// Rate conventions for a state with occupancies n_k:
//   merge sizes i < j          psi(i, j) n_i n_j
//   merge two groups of size i psi(i, i) n_i (n_i - 1) / 2
//   split i + j into i < j     phi(i, j) n_{i+j}
//   split 2i into i + i        phi(i, i) n_{2i} / 2
// Under these conventions mu_N satisfies detailed balance exactly.

#pragma once

#include "cfp/numeric.hpp"
#include "cfp/params.hpp"
#include "cfp/partitions.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

namespace cfp {

struct Rate {
  double value = 0.0;
  std::optional<Rational> exact;
};

class RateKernel {
 public:
  using Fn = std::function<Rate(int, int)>;

  /// Tabulates psi and phi for 1 <= i <= j, i + j <= N. Both must be positive.
  RateKernel(int N, const Fn& psi, const Fn& phi);

  int N() const { return N_; }
  bool has_exact() const { return exact_; }
  const Rate& psi(int i, int j) const;
  const Rate& phi(int i, int j) const;

  /// Multiplies psi(i, j) by factor (negative controls, sensitivity runs).
  void scale_psi(int i, int j, const Number& factor);

  /// max over i + j <= N of |psi/phi - a_{i+j}/(a_i a_j)| / (a_{i+j}/(a_i a_j)).
  double ratio_violation(const ParameterFunction& f) const;

 private:
  std::size_t index(int i, int j) const;
  int N_;
  bool exact_ = true;
  std::vector<Rate> psi_;
  std::vector<Rate> phi_;
};

/// psi(i, j) = a_{i+j}, phi(i, j) = a_i a_j.
RateKernel canonical_kernel(const ParameterFunction& f, int N);

struct Move {
  enum class Type { coagulation, fragmentation };
  Type type = Type::coagulation;
  int i = 0;  // i <= j
  int j = 0;

  friend bool operator==(const Move&, const Move&) = default;
};

struct MoveRate {
  Move move;
  Rate rate;
};

/// All moves with nonzero rate out of eta, coagulations first.
std::vector<MoveRate> state_rates(const Partition& eta, const RateKernel& kernel);
Partition apply_move(const Partition& eta, const Move& move);

struct BalanceReport {
  double max_violation = 0.0;
  std::optional<Rational> max_violation_exact;  // rational mode only
  std::size_t transitions_checked = 0;
};

/// Max over connected (eta, eta') of |mu(eta) q(eta, eta') - mu(eta') q(eta', eta)| / max(both).
BalanceReport detailed_balance_check(const ParameterFunction& f, int N, const RateKernel& kernel,
                                     int cap = kDefaultEnumerationCap);

struct Event {
  double time = 0.0;
  Move move;
};

struct Trajectory {
  Partition initial;
  Partition final_state;
  std::vector<Event> events;  // empty unless recorded
  std::map<Partition, double> occupation;
  double total_time = 0.0;
  std::uint64_t event_count = 0;
};

struct SimulationOptions {
  double t_max = std::numeric_limits<double>::infinity();
  std::uint64_t event_cap = 0;  // 0: no cap
  std::uint64_t seed = 1;
  bool record_events = true;
};

/// Exact stochastic simulation. The kernel must realise psi/phi =
/// a_{i+j}/(a_i a_j) to 1e-12 relative. Defaults to the all-singletons start.
Trajectory simulate(const ParameterFunction& f, int N, const RateKernel& kernel, const SimulationOptions& options,
                    std::optional<Partition> initial = std::nullopt);

/// States at times burn_in, burn_in + spacing, ... (needs recorded events).
std::vector<Partition> sample_path(const Trajectory& traj, double spacing, double burn_in = 0.0);

/// 1 / spectral gap of the generator on the partitions of N.
double relaxation_time(const ParameterFunction& f, int N, const RateKernel& kernel,
                       int cap = kDefaultEnumerationCap);

struct OccupationRow {
  Partition state;
  double occupation_time = 0.0;
  double fraction = 0.0;
  double mu = 0.0;
  double z_score = 0.0;  // batch-means standardised deviation from mu
};

/// One row per state of the partitions of N, in enumeration order.
std::vector<OccupationRow> occupation_summary(const Trajectory& traj, const ParameterFunction& f, int N,
                                              int batches = 50);

double total_variation(const Trajectory& traj, const ParameterFunction& f, int N);

}  // namespace cfp
