#include "cfp/exact_seq.hpp"
#include "cfp/partitions.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace cfp;

TEST_CASE("partition validation and formatting") {
  const Partition p(4, {{1, 2}, {2, 1}});
  CHECK(p.to_string() == "1^2 2^1");
  CHECK(p.count(1) == 2);
  CHECK(p.count(3) == 0);
  CHECK(p.num_groups() == 3);
  CHECK(p.counts() == std::vector<int>{2, 1, 0, 0});
  CHECK(Partition::from_counts({2, 1, 0, 0}) == p);
  CHECK_THROWS_AS(Partition(4, {{1, 1}, {2, 1}}), Error);
  CHECK_THROWS_AS(Partition(4, {{5, 1}}), Error);
  CHECK_THROWS_AS(Partition(4, {{1, -1}, {5, 1}}), Error);
}

TEST_CASE("enumeration counts match p(N) up to 40") {
  for (int N = 1; N <= 40; ++N) {
    PartitionGenerator gen(N);
    long count = 0;
    while (gen.next()) ++count;
    CHECK(count == oracle::kPartitionNumbers[static_cast<std::size_t>(N)]);
  }
}

TEST_CASE("small enumerations") {
  const auto one = enumerate_partitions(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].count(1) == 1);
  CHECK(enumerate_partitions(4).size() == 5);
  CHECK(enumerate_partitions(6).size() == 11);
  CHECK_THROWS_AS(enumerate_partitions(41), Error);
  CHECK_NOTHROW(enumerate_partitions(41, 41));
  CHECK_THROWS_AS(enumerate_partitions(0), Error);
}

TEST_CASE("enumeration order is decreasing lexicographic, no repeats") {
  const auto parts = enumerate_partitions(12);
  CHECK(parts.front().to_string() == "12^1");
  CHECK(parts.back().to_string() == "1^12");
  std::set<std::vector<int>> seen;
  std::vector<int> prev;
  for (const auto& p : parts) {
    std::vector<int> desc;
    for (auto it = p.parts().rbegin(); it != p.parts().rend(); ++it) desc.insert(desc.end(), it->second, it->first);
    if (!prev.empty()) CHECK(desc < prev);
    prev = desc;
    CHECK(seen.insert(p.counts()).second);
    int mass = 0;
    for (auto [k, m] : p.parts()) mass += k * m;
    CHECK(mass == 12);
  }
}

TEST_CASE("weights") {
  CHECK(*weight(Partition(2, {{1, 2}}), ParameterFunction::ewens(1)).exact == Rational(1, 2));
  CHECK(*weight(Partition(2, {{2, 1}}), ParameterFunction::power_law(1)).exact == 1);
  CHECK(*weight(Partition(3, {{1, 1}, {2, 1}}), ParameterFunction::ewens(2)).exact == 2);
  const auto w = weight(Partition(2, {{1, 2}}), ParameterFunction::power_law(Number::inexact(1.5)));
  CHECK_FALSE(w.exact);
  CHECK(to_double(w.value) == doctest::Approx(0.5));
}

TEST_CASE("brute-force c_N") {
  for (int N = 1; N <= 20; ++N) CHECK(*c_exact_bruteforce(N, ParameterFunction::ewens(1)).exact == 1);
  CHECK(*c_exact_bruteforce(2, ParameterFunction::power_law(1)).exact == Rational(3, 2));
  CHECK(*c_exact_bruteforce(2, ParameterFunction::ewens(2)).exact == 3);
}

TEST_CASE("brute force agrees with the independent enumeration and the recurrence") {
  const std::vector<ParameterFunction> fams = {
      ParameterFunction::ewens(1), ParameterFunction::ewens(2), ParameterFunction::power_law(1),
      ParameterFunction::power_law(2), ParameterFunction::power_law(3),
      ParameterFunction::table({Rational(3, 7), 2, Rational(5, 3), 1, Rational(1, 9), 4, Rational(2, 5), 7,
                                Rational(11, 13), 1})};
  for (const auto& f : fams) {
    const int top = f.max_index().value_or(20);
    const auto seq = compute_cn(f, top, SeqMode::rational());
    for (int N = 1; N <= top; ++N) {
      const Rational c = *c_exact_bruteforce(N, f).exact;
      CHECK(c == oracle::c_by_enumeration(N, f));
      CHECK(c == seq.c_exact(N));
    }
  }
}

TEST_CASE("mu_N") {
  const auto one = mu_exact(1, ParameterFunction::power_law(2));
  REQUIRE(one.size() == 1);
  CHECK(*one[0].prob.exact == 1);

  const auto e3 = mu_exact(3, ParameterFunction::ewens(1));
  REQUIRE(e3.size() == 3);
  CHECK(e3[0].state.to_string() == "3^1");
  CHECK(*e3[0].prob.exact == Rational(1, 3));
  CHECK(*e3[1].prob.exact == Rational(1, 2));
  CHECK(*e3[2].prob.exact == Rational(1, 6));

  const auto p2 = mu_exact(2, ParameterFunction::power_law(1));
  CHECK(*p2[0].prob.exact == Rational(2, 3));
  CHECK(*p2[1].prob.exact == Rational(1, 3));
}

TEST_CASE("mu_N sums to one") {
  for (const auto& f : {ParameterFunction::ewens(2), ParameterFunction::power_law(3)}) {
    for (int N = 1; N <= 20; ++N) {
      Rational s = 0;
      for (const auto& e : mu_exact(N, f)) s += *e.prob.exact;
      CHECK(s == 1);
    }
  }
  Float s = 0;
  for (const auto& e : mu_exact(15, ParameterFunction::power_law(Number::inexact(0.7)))) s += e.prob.value;
  CHECK(std::abs(to_double(s) - 1.0) < 1e-14);
}
