#include "cfp/stats.hpp"

#include "cfp/saddle.hpp"

#include <cmath>
#include <thread>

namespace cfp {

namespace {

void check_cover(const CnSequence& seq, int N) {
  if (N < 1) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
  if (seq.N() < N) {
    throw Error(ErrorCode::out_of_range, "sequence covers c_0..c_" + std::to_string(seq.N()) +
                                             ", need c_" + std::to_string(N));
  }
}

void check_pair(int N, int k, int l) {
  if (k < 1 || l < 1 || k == l || k + l > N) {
    throw Error(ErrorCode::invalid_argument, "covariance formula needs k != l, k, l >= 1 and k + l <= N; got (" +
                                                 std::to_string(k) + ", " + std::to_string(l) + ")");
  }
}

}  // namespace

std::vector<double> expected_counts(const ParameterFunction& f, int N, const CnSequence& seq) {
  check_cover(seq, N);
  std::vector<double> out(static_cast<std::size_t>(N));
  const Float log_cN = seq.log_c(N);
  for (int k = 1; k <= N; ++k) {
    Float log_term = log(f.a_float(k)) + seq.log_c(N - k) - log_cN;
    out[static_cast<std::size_t>(k - 1)] = to_double(exp(log_term));
  }
  return out;
}

std::vector<Rational> expected_counts_exact(const ParameterFunction& f, int N, const CnSequence& seq) {
  check_cover(seq, N);
  std::vector<Rational> out(static_cast<std::size_t>(N));
  for (int k = 1; k <= N; ++k) out[static_cast<std::size_t>(k - 1)] = f.a_exact(k) * seq.c_exact(N - k) / seq.c_exact(N);
  return out;
}

double mean_group_count(const ParameterFunction& f, int n, const CnSequence& seq) {
  CompensatedSum<double> acc;
  for (double e : expected_counts(f, n, seq)) acc.add(e);
  return acc.value();
}

double covariance(const ParameterFunction& f, int N, int k, int l, const CnSequence& seq) {
  check_cover(seq, N);
  check_pair(N, k, l);
  if (seq.rational_values()) return covariance_exact(f, N, k, l, seq).convert_to<double>();
  const Float log_ak_al = log(f.a_float(k)) + log(f.a_float(l));
  const Float joint = exp(Float(log_ak_al + seq.log_c(N - k - l) - seq.log_c(N)));
  const Float product = exp(Float(log_ak_al + seq.log_c(N - k) + seq.log_c(N - l) - 2 * seq.log_c(N)));
  return to_double(Float(joint - product));
}

Rational covariance_exact(const ParameterFunction& f, int N, int k, int l, const CnSequence& seq) {
  check_cover(seq, N);
  check_pair(N, k, l);
  const Rational& cN = seq.c_exact(N);
  return f.a_exact(k) * f.a_exact(l) *
         (seq.c_exact(N - k - l) / cN - seq.c_exact(N - k) * seq.c_exact(N - l) / (cN * cN));
}

EquilibriumReport equilibrium_report(const ParameterFunction& f, int N, const CnSequence& seq,
                                     const std::vector<std::pair<int, int>>& pairs) {
  EquilibriumReport report;
  report.N = N;
  report.expected_counts = expected_counts(f, N, seq);
  CompensatedSum<double> v;
  for (double e : report.expected_counts) v.add(e);
  report.v_N = v.value();
  for (auto [k, l] : pairs) report.cov_entries.push_back({k, l, covariance(f, N, k, l, seq)});
  return report;
}

double gelation_diagnostic(const ParameterFunction& f, int N, double alpha, const CnSequence& seq) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
  const int m = static_cast<int>(std::floor(alpha * N));
  if (m < 2) throw Error(ErrorCode::invalid_argument, "floor(alpha N) must be >= 2");
  return mean_group_count(f, N, seq) - mean_group_count(f, m - 1, seq);
}

double gelation_diagnostic(const ParameterFunction& f, int N, double alpha) {
  return gelation_diagnostic(f, N, alpha, compute_cn(f, N));
}

SampleResult sample_mu(const ParameterFunction& f, int N, double tilt, std::mt19937_64& rng,
                       std::uint64_t max_attempts) {
  if (N < 1) throw Error(ErrorCode::invalid_argument, "N must be >= 1");
  if (max_attempts < 1) throw Error(ErrorCode::invalid_argument, "max_attempts must be >= 1");
  std::vector<std::poisson_distribution<long long>> draws;
  draws.reserve(static_cast<std::size_t>(N));
  for (int i = 1; i <= N; ++i) draws.emplace_back(std::exp(f.log_a(i) - tilt * i));

  std::vector<int> counts(static_cast<std::size_t>(N));
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    long long mass = 0;
    for (int i = 1; i <= N; ++i) {
      const long long z = draws[static_cast<std::size_t>(i - 1)](rng);
      counts[static_cast<std::size_t>(i - 1)] = static_cast<int>(std::min<long long>(z, N + 1));
      mass += static_cast<long long>(i) * z;
    }
    if (mass == N) return {Partition::from_counts(counts), attempt};
  }
  throw Error(ErrorCode::attempts_exhausted,
              "no acceptance in " + std::to_string(max_attempts) + " attempts (acceptance rate estimate < " +
                  format_real(1.0 / static_cast<double>(max_attempts)) + ")");
}

SampleResult sample_mu(const ParameterFunction& f, int N, std::optional<double> tilt, std::uint64_t seed,
                       std::uint64_t max_attempts) {
  std::mt19937_64 rng(mix_seed(seed, 0));
  return sample_mu(f, N, tilt ? *tilt : solve_sigma(f, N).sigma_n, rng, max_attempts);
}

SamplerRun sample_mu_many(const ParameterFunction& f, int N, std::size_t count, std::optional<double> tilt,
                          std::uint64_t master_seed, unsigned threads, unsigned replicas,
                          std::uint64_t max_attempts_per_sample) {
  if (replicas < 1) throw Error(ErrorCode::invalid_argument, "replicas must be >= 1");
  SamplerRun run;
  run.tilt = tilt ? *tilt : solve_sigma(f, N).sigma_n;

  struct Chunk {
    std::vector<Partition> samples;
    std::uint64_t attempts = 0;
    std::exception_ptr error;
  };
  std::vector<Chunk> chunks(replicas);
  auto work = [&](unsigned r) {
    try {
      std::mt19937_64 rng(mix_seed(master_seed, r));
      const std::size_t quota = count / replicas + (r < count % replicas ? 1 : 0);
      for (std::size_t i = 0; i < quota; ++i) {
        SampleResult s = sample_mu(f, N, run.tilt, rng, max_attempts_per_sample);
        chunks[r].attempts += s.attempts;
        chunks[r].samples.push_back(std::move(s.state));
      }
    } catch (...) {
      chunks[r].error = std::current_exception();
    }
  };

  threads = std::max(1u, std::min(threads, replicas));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (unsigned r = t; r < replicas; r += threads) work(r);
    });
  }
  for (auto& th : pool) th.join();

  for (auto& c : chunks) {
    if (c.error) std::rethrow_exception(c.error);
    run.attempts += c.attempts;
    for (auto& s : c.samples) run.samples.push_back(std::move(s));
  }
  run.acceptance_rate = run.attempts ? static_cast<double>(run.samples.size()) / static_cast<double>(run.attempts) : 0.0;
  return run;
}

}  // namespace cfp
