#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cascadebai/instance.hpp"
#include "cascadebai/rng.hpp"

using namespace cascadebai;
using Catch::Approx;

namespace {

Instance make(std::vector<double> w, int K, double eps = 0.0,
              double delta = 0.1) {
  Instance inst;
  inst.weights = std::move(w);
  inst.K = K;
  inst.epsilon = eps;
  inst.delta = delta;
  return validate(std::move(inst));
}

Instance random_instance(SplitMix64& rng) {
  const int L = 3 + static_cast<int>(rng() % 10);
  std::vector<double> w(L);
  for (double& x : w)
    x = 0.02 + 0.96 * rng.uniform01();
  std::sort(w.begin(), w.end(), std::greater<>());
  int K = 1 + static_cast<int>(rng() % (L - 1));
  while (K < L && !(w[K - 1] > w[K]))
    ++K; // dodge exact ties at the boundary (probability ~0 anyway)
  return make(std::move(w), std::min(K, L - 1));
}

} // namespace

TEST_CASE("validate canonicalizes and maps back to user order") {
  const Instance inst = make({0.3, 0.9, 0.5}, 1);
  CHECK(inst.weights == std::vector<double>{0.9, 0.5, 0.3});
  CHECK(inst.original_index == std::vector<int>{1, 2, 0});
  CHECK(inst.L() == 3);
  CHECK(inst.w_max() == 0.9);
  CHECK(inst.w_min() == 0.3);
}

TEST_CASE("validate rejects degenerate and malformed inputs") {
  CHECK_THROWS_AS(make({0.5, 0.5}, 1), DegenerateBoundary);
  CHECK_THROWS_AS(make({}, 1), EmptyWeights);
  CHECK_THROWS_AS(make({0.5}, 1), BadInstance);
  CHECK_THROWS_AS(make({0.9, 0.5}, 0), BadInstance);
  CHECK_THROWS_AS(make({0.9, 0.5}, 3), BadInstance);
  CHECK_THROWS_AS(make({0.9, 1.5}, 1), WeightOutOfRange);
  CHECK_THROWS_AS(make({0.9, -0.1}, 1), WeightOutOfRange);
  CHECK_THROWS_AS(make({0.9, 0.5}, 1, 0.0, 0.0), BadDelta);
  CHECK_THROWS_AS(make({0.9, 0.5}, 1, 0.0, 1.0), BadDelta);
  CHECK_THROWS_AS(make({0.9, 0.5}, 1, -0.1), BadInstance);
}

TEST_CASE("K = L needs no boundary check") {
  const Instance inst = make({0.9, 0.5}, 2);
  CHECK(inst.K == 2);
}

TEST_CASE("rho evaluates the stated formula") {
  CHECK(rho(0.12, 1) == Approx(0.1).epsilon(1e-12));
  CHECK(rho(0.1, 12) == Approx(std::sqrt(1.0 / 1440.0)).epsilon(1e-12));
  CHECK_THROWS_AS(rho(0.0, 4), BadDelta);
  CHECK_THROWS_AS(rho(1.0, 4), BadDelta);
  // monotone decreasing in L
  double prev = rho(0.1, 1);
  for (int L = 2; L <= 64; L *= 2) {
    const double cur = rho(0.1, L);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("threshold matches the frozen reference value") {
  // bar_delta = 0.2, delta = 0.1, L = 8, evaluated at high precision.
  CHECK(threshold(0.2, 0.1, 8) == 38166);
  CHECK_THROWS_AS(threshold(0.0, 0.1, 8), NonPositiveGap);
  CHECK_THROWS_AS(threshold(-0.2, 0.1, 8), NonPositiveGap);
}

TEST_CASE("threshold is nonincreasing in the gap, nondecreasing in L") {
  long long prev = threshold(0.05, 0.1, 16);
  for (double d = 0.1; d <= 0.9; d += 0.05) {
    const long long cur = threshold(d, 0.1, 16);
    CHECK(cur <= prev);
    prev = cur;
  }
  prev = threshold(0.2, 0.1, 2);
  for (int L = 4; L <= 1024; L *= 2) {
    const long long cur = threshold(0.2, 0.1, L);
    CHECK(cur >= prev);
    prev = cur;
  }
}

TEST_CASE("gaps on the three-item reference instance") {
  SECTION("epsilon = 0") {
    const GapProfile g = gaps(make({0.9, 0.5, 0.3}, 1, 0.0));
    CHECK(g.k_prime == 1);
    CHECK(g.deltas[0] == Approx(0.4).epsilon(1e-12));
    CHECK(g.deltas[1] == Approx(0.4).epsilon(1e-12));
    CHECK(g.deltas[2] == Approx(0.6).epsilon(1e-12));
    for (int i = 0; i < 3; ++i)
      CHECK(g.bar_deltas[i] == g.deltas[i]);
  }
  SECTION("epsilon = 0.25 leaves k_prime at K") {
    const GapProfile g = gaps(make({0.9, 0.5, 0.3}, 1, 0.25));
    CHECK(g.k_prime == 1);
    CHECK(g.bar_deltas[0] == Approx(0.65).epsilon(1e-12));
    CHECK(g.bar_deltas[1] == Approx(0.15).epsilon(1e-12));
    CHECK(g.bar_deltas[2] == Approx(0.35).epsilon(1e-12));
  }
  SECTION("epsilon = 0.45 activates the middle branch") {
    const GapProfile g = gaps(make({0.9, 0.5, 0.3}, 1, 0.45));
    CHECK(g.k_prime == 2);
    CHECK(g.bar_deltas[0] == Approx(0.85).epsilon(1e-12));
    CHECK(g.bar_deltas[1] == Approx(0.45).epsilon(1e-12));
    CHECK(g.bar_deltas[2] == Approx(0.15).epsilon(1e-12));
  }
}

TEST_CASE("sigma is a permutation sorting adjusted gaps nonincreasing") {
  SplitMix64 rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const Instance inst = random_instance(rng);
    const GapProfile g = gaps(inst);
    std::vector<int> seen = g.sigma;
    std::sort(seen.begin(), seen.end());
    std::vector<int> want(inst.L());
    std::iota(want.begin(), want.end(), 0);
    REQUIRE(seen == want);
    for (int i = 1; i < inst.L(); ++i) {
      REQUIRE(g.bar_deltas[g.sigma[i - 1]] >= g.bar_deltas[g.sigma[i]]);
      if (g.bar_deltas[g.sigma[i - 1]] == g.bar_deltas[g.sigma[i]])
        REQUIRE(g.sigma[i - 1] < g.sigma[i]); // ties: smaller index first
    }
    for (double bd : g.bar_deltas)
      REQUIRE(bd > 0.0);
    REQUIRE(g.k_prime >= inst.K);
    REQUIRE(g.k_prime <= inst.L());
  }
}

TEST_CASE("epsilon = 0 gives k_prime = K and bar_deltas = deltas") {
  SplitMix64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const Instance inst = random_instance(rng);
    const GapProfile g = gaps(inst);
    REQUIRE(g.k_prime == inst.K);
    for (int i = 0; i < inst.L(); ++i)
      REQUIRE(g.bar_deltas[i] == g.deltas[i]);
  }
}

TEST_CASE("thresholds in a profile agree with the threshold op") {
  const Instance inst = make({0.9, 0.5, 0.3}, 1, 0.0, 0.1);
  const GapProfile g = gaps(inst);
  for (int i = 0; i < inst.L(); ++i)
    CHECK(g.thresholds[i] == threshold(g.bar_deltas[i], inst.delta, inst.L()));
}

TEST_CASE("two-probability generator") {
  const Instance inst = make_two_prob(0.8, 0.2, 2, 4);
  CHECK(inst.weights == std::vector<double>{0.8, 0.8, 0.2, 0.2});
  CHECK(inst.K == 2);
  CHECK_THROWS_AS(make_two_prob(0.2, 0.8, 2, 4), BadInstance);
  CHECK_THROWS_AS(make_two_prob(0.5, 0.5, 2, 4), BadInstance);
}

TEST_CASE("linspace generator") {
  const Instance inst = make_linspace(0.9, 0.15, 16, 4);
  CHECK(inst.L() == 16);
  CHECK(inst.weights.front() == Approx(0.9));
  CHECK(inst.weights.back() == Approx(0.15));
  for (int i = 1; i < 16; ++i)
    CHECK(inst.weights[i - 1] - inst.weights[i] == Approx(0.05).epsilon(1e-9));
}
