// Partitions of N and the brute-force oracle over the full state space.

#pragma once

#include "cfp/numeric.hpp"
#include "cfp/params.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cfp {

inline constexpr int kDefaultEnumerationCap = 40;

/// Occupancy vector (n_1, ..., n_N) with sum k n_k = N, stored sparsely as
/// (size, multiplicity) pairs in increasing size order.
class Partition {
 public:
  using Part = std::pair<int, int>;  // (group size k, multiplicity n_k)

  Partition() = default;
  /// Parts may be in any order; zero multiplicities are dropped.
  Partition(int N, std::vector<Part> parts);
  /// counts[k-1] = n_k.
  static Partition from_counts(const std::vector<int>& counts);

  int N() const { return N_; }
  const std::vector<Part>& parts() const { return parts_; }
  int count(int k) const;
  std::vector<int> counts() const;
  int num_groups() const;

  /// Run-length form such as "1^2 3^1".
  std::string to_string() const;

  friend bool operator==(const Partition&, const Partition&) = default;
  friend auto operator<=>(const Partition&, const Partition&) = default;

 private:
  int N_ = 0;
  std::vector<Part> parts_;
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const noexcept;
};

/// Stateful single-consumer generator over the partitions of N, in
/// decreasing lexicographic order of the part multisets: N, N-1+1, ...,
/// 1+...+1.
class PartitionGenerator {
 public:
  explicit PartitionGenerator(int N, int cap = kDefaultEnumerationCap);
  std::optional<Partition> next();

 private:
  int N_;
  std::vector<int> parts_;  // nonincreasing
  bool done_ = false;
  bool started_ = false;
};

std::vector<Partition> enumerate_partitions(int N, int cap = kDefaultEnumerationCap);

/// A value known in extended precision and, when available, exactly.
struct ExactOrFloat {
  std::optional<Rational> exact;
  Float value;
};

/// prod_k a_k^{n_k} / n_k!.
ExactOrFloat weight(const Partition& eta, const ParameterFunction& f);

/// Sum of weights over all partitions of N.
ExactOrFloat c_exact_bruteforce(int N, const ParameterFunction& f, int cap = kDefaultEnumerationCap);

struct MeasureEntry {
  Partition state;
  ExactOrFloat weight;
  ExactOrFloat prob;
};

/// The equilibrium measure mu_N, in enumeration order.
std::vector<MeasureEntry> mu_exact(int N, const ParameterFunction& f, int cap = kDefaultEnumerationCap);

}  // namespace cfp
