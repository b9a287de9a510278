#include "cfp/partitions.hpp"

#include <algorithm>
#include <map>

namespace cfp {

Partition::Partition(int N, std::vector<Part> parts) : N_(N) {
  if (N < 1) throw Error(ErrorCode::invalid_argument, "partition size N must be >= 1");
  std::map<int, int> merged;
  for (auto [k, m] : parts) {
    if (k < 1 || k > N || m < 0 || m > N) {
      throw Error(ErrorCode::invalid_argument, "invalid part (" + std::to_string(k) + ", " +
                                                   std::to_string(m) + ") for N = " + std::to_string(N));
    }
    if (m > 0) merged[k] += m;
  }
  long long mass = 0;
  for (auto [k, m] : merged) {
    mass += static_cast<long long>(k) * m;
    parts_.emplace_back(k, m);
  }
  if (mass != N) {
    throw Error(ErrorCode::invalid_argument,
                "parts sum to " + std::to_string(mass) + ", expected N = " + std::to_string(N));
  }
}

Partition Partition::from_counts(const std::vector<int>& counts) {
  std::vector<Part> parts;
  long long mass = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) parts.emplace_back(static_cast<int>(i + 1), counts[i]);
    mass += static_cast<long long>(i + 1) * counts[i];
  }
  return Partition(static_cast<int>(mass), std::move(parts));
}

int Partition::count(int k) const {
  auto it = std::lower_bound(parts_.begin(), parts_.end(), Part{k, 0});
  return (it != parts_.end() && it->first == k) ? it->second : 0;
}

std::vector<int> Partition::counts() const {
  std::vector<int> out(static_cast<std::size_t>(N_), 0);
  for (auto [k, m] : parts_) out[static_cast<std::size_t>(k - 1)] = m;
  return out;
}

int Partition::num_groups() const {
  int total = 0;
  for (auto [k, m] : parts_) total += m;
  return total;
}

std::string Partition::to_string() const {
  std::string s;
  for (auto [k, m] : parts_) {
    if (!s.empty()) s += ' ';
    s += std::to_string(k) + '^' + std::to_string(m);
  }
  return s;
}

std::size_t PartitionHash::operator()(const Partition& p) const noexcept {
  std::size_t h = static_cast<std::size_t>(p.N());
  for (auto [k, m] : p.parts()) {
    h ^= static_cast<std::size_t>(k * 1000003 + m) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

PartitionGenerator::PartitionGenerator(int N, int cap) : N_(N) {
  if (N < 1) throw Error(ErrorCode::invalid_argument, "enumeration needs N >= 1");
  if (N > cap) {
    throw Error(ErrorCode::cap_exceeded, "N = " + std::to_string(N) + " exceeds the enumeration cap " +
                                             std::to_string(cap) + "; raise the cap explicitly to enumerate");
  }
  parts_.push_back(N);
}

std::optional<Partition> PartitionGenerator::next() {
  if (done_) return std::nullopt;
  if (started_) {
    int ones = 0;
    while (!parts_.empty() && parts_.back() == 1) {
      parts_.pop_back();
      ++ones;
    }
    if (parts_.empty()) {
      done_ = true;
      return std::nullopt;
    }
    int v = --parts_.back();
    int rest = ones + 1;
    while (rest > 0) {
      int take = std::min(v, rest);
      parts_.push_back(take);
      rest -= take;
    }
  }
  started_ = true;
  std::vector<Partition::Part> sparse;
  for (int k : parts_) {
    if (!sparse.empty() && sparse.back().first == k) {
      ++sparse.back().second;
    } else {
      sparse.emplace_back(k, 1);
    }
  }
  return Partition(N_, std::move(sparse));
}

std::vector<Partition> enumerate_partitions(int N, int cap) {
  PartitionGenerator gen(N, cap);
  std::vector<Partition> out;
  while (auto p = gen.next()) out.push_back(std::move(*p));
  return out;
}

ExactOrFloat weight(const Partition& eta, const ParameterFunction& f) {
  ExactOrFloat w;
  w.value = 1;
  bool exact = f.has_exact();
  if (exact) w.exact = Rational(1);
  for (auto [k, m] : eta.parts()) {
    Float ak = f.a_float(k);
    Float term = pow(ak, m) / boost::multiprecision::tgamma(Float(m + 1));
    w.value *= term;
    if (exact) {
      Rational ak_exact = f.a_exact(k);
      Rational power = 1;
      BigInt factorial = 1;
      for (int i = 1; i <= m; ++i) {
        power *= ak_exact;
        factorial *= i;
      }
      *w.exact *= power / Rational(factorial);
    }
  }
  if (w.exact) w.value = Float(*w.exact);
  return w;
}

ExactOrFloat c_exact_bruteforce(int N, const ParameterFunction& f, int cap) {
  PartitionGenerator gen(N, cap);
  ExactOrFloat total;
  total.value = 0;
  if (f.has_exact()) total.exact = Rational(0);
  while (auto eta = gen.next()) {
    ExactOrFloat w = weight(*eta, f);
    total.value += w.value;
    if (total.exact) *total.exact += *w.exact;
  }
  if (total.exact) total.value = Float(*total.exact);
  return total;
}

std::vector<MeasureEntry> mu_exact(int N, const ParameterFunction& f, int cap) {
  std::vector<MeasureEntry> out;
  PartitionGenerator gen(N, cap);
  ExactOrFloat total;
  total.value = 0;
  if (f.has_exact()) total.exact = Rational(0);
  while (auto eta = gen.next()) {
    ExactOrFloat w = weight(*eta, f);
    MeasureEntry e{std::move(*eta), std::move(w), {}};
    total.value += e.weight.value;
    if (total.exact) *total.exact += *e.weight.exact;
    out.push_back(std::move(e));
  }
  for (auto& e : out) {
    if (total.exact) {
      e.prob.exact = *e.weight.exact / *total.exact;
      e.prob.value = Float(*e.prob.exact);
    } else {
      e.prob.value = e.weight.value / total.value;
    }
  }
  return out;
}

}  // namespace cfp
