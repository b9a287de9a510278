// Equilibrium observables of mu_N and exact sampling by conditioning
// independent Poisson variables on sum i Z_i = N.

#pragma once

#include "cfp/exact_seq.hpp"
#include "cfp/params.hpp"
#include "cfp/partitions.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace cfp {

struct CovarianceEntry {
  int k = 0;
  int l = 0;
  double value = 0.0;
};

struct EquilibriumReport {
  int N = 0;
  std::vector<double> expected_counts;  // index k-1 holds E n_k
  double v_N = 0.0;                     // expected number of groups
  std::vector<CovarianceEntry> cov_entries;
};

/// E n_k = a_k c_{N-k} / c_N for k = 1..N, evaluated in log space.
std::vector<double> expected_counts(const ParameterFunction& f, int N, const CnSequence& seq);
/// Same, exactly; needs a rational-mode sequence.
std::vector<Rational> expected_counts_exact(const ParameterFunction& f, int N, const CnSequence& seq);

/// v_n = sum_{k<=n} a_k c_{n-k} / c_n.
double mean_group_count(const ParameterFunction& f, int n, const CnSequence& seq);

/// cov(n_k, n_l) = a_k a_l (c_{N-k-l}/c_N - c_{N-k} c_{N-l}/c_N^2), k != l, k + l <= N.
double covariance(const ParameterFunction& f, int N, int k, int l, const CnSequence& seq);
Rational covariance_exact(const ParameterFunction& f, int N, int k, int l, const CnSequence& seq);

EquilibriumReport equilibrium_report(const ParameterFunction& f, int N, const CnSequence& seq,
                                     const std::vector<std::pair<int, int>>& pairs);

/// v_N - v_{floor(alpha N) - 1}.
double gelation_diagnostic(const ParameterFunction& f, int N, double alpha, const CnSequence& seq);
double gelation_diagnostic(const ParameterFunction& f, int N, double alpha);

struct SampleResult {
  Partition state;
  std::uint64_t attempts = 0;
};

/// Rejection sampler: Z_i ~ Poisson(a_i e^{-tilt i}), i = 1..N, accepted when
/// sum i Z_i = N. The accepted law is mu_N for every tilt; the default tilt
/// sigma_N maximises the acceptance probability.
SampleResult sample_mu(const ParameterFunction& f, int N, double tilt, std::mt19937_64& rng,
                       std::uint64_t max_attempts);
SampleResult sample_mu(const ParameterFunction& f, int N, std::optional<double> tilt, std::uint64_t seed,
                       std::uint64_t max_attempts);

struct SamplerRun {
  std::vector<Partition> samples;
  std::uint64_t attempts = 0;
  double acceptance_rate = 0.0;
  double tilt = 0.0;
};

/// `count` samples split over a fixed number of replicas; replica r uses the
/// seed mix_seed(master_seed, r), so results do not depend on `threads`.
SamplerRun sample_mu_many(const ParameterFunction& f, int N, std::size_t count, std::optional<double> tilt,
                          std::uint64_t master_seed, unsigned threads = 1, unsigned replicas = 16,
                          std::uint64_t max_attempts_per_sample = 100'000'000);

}  // namespace cfp
