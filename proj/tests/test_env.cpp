#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cascadebai/env.hpp"
#include "cascadebai/rng.hpp"

using namespace cascadebai;
using Catch::Approx;

namespace {

std::vector<double> random_arm(SplitMix64& rng, int max_len) {
  const int k = 1 + static_cast<int>(rng() % max_len);
  std::vector<double> w(k);
  for (double& x : w)
    x = rng.uniform01();
  return w;
}

} // namespace

TEST_CASE("cascade_step forced outcomes") {
  SplitMix64 rng(1);
  const std::vector<double> certain{1.0, 0.3};
  for (int i = 0; i < 50; ++i) {
    const CascadeFeedback fb = cascade_step(certain, rng);
    REQUIRE(fb.click_position == 1);
    REQUIRE(fb.observed_count == 1);
    REQUIRE(fb.clicked());
  }
  const std::vector<double> never{0.0, 0.0, 0.0};
  for (int i = 0; i < 50; ++i) {
    const CascadeFeedback fb = cascade_step(never, rng);
    REQUIRE(fb.click_position == 0);
    REQUIRE(fb.observed_count == 3);
    REQUIRE_FALSE(fb.clicked());
  }
}

TEST_CASE("cascade_step empirical click frequency") {
  SplitMix64 rng(20200213);
  const std::vector<double> arm{0.5, 0.5};
  int first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (cascade_step(arm, rng).click_position == 1)
      ++first;
  CHECK(std::abs(first / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("cascade feedback respects the type invariants") {
  SplitMix64 rng(5);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto arm = random_arm(rng, 8);
    const CascadeFeedback fb = cascade_step(arm, rng);
    if (fb.clicked()) {
      REQUIRE(fb.click_position >= 1);
      REQUIRE(fb.click_position <= static_cast<int>(arm.size()));
      REQUIRE(fb.observed_count == fb.click_position);
    } else {
      REQUIRE(fb.observed_count == static_cast<int>(arm.size()));
    }
  }
}

TEST_CASE("identical streams give identical feedback sequences") {
  const RngSpec spec{123456789ULL, 17};
  SplitMix64 a = spec.make_stream();
  SplitMix64 b = spec.make_stream();
  const std::vector<double> arm{0.7, 0.4, 0.2, 0.1};
  for (int i = 0; i < 1000; ++i) {
    const CascadeFeedback fa = cascade_step(arm, a);
    const CascadeFeedback fb = cascade_step(arm, b);
    REQUIRE(fa.click_position == fb.click_position);
  }
}

TEST_CASE("expected_observations closed-form examples") {
  CHECK(expected_observations(std::vector<double>{0.5, 0.5}) ==
        Approx(1.5).epsilon(1e-12));
  CHECK(expected_observations(std::vector<double>{0.9, 0.1}) ==
        Approx(1.1).epsilon(1e-12));
  CHECK(expected_observations(std::vector<double>{0.1, 0.9}) ==
        Approx(1.9).epsilon(1e-12));
  CHECK(expected_observations(std::vector<double>{0.42}) == 1.0);
}

TEST_CASE("observation_moment examples") {
  CHECK(observation_moment(std::vector<double>{0.5, 0.5}, 2) ==
        Approx(2.5).epsilon(1e-12));
  const std::vector<double> ones(7, 1.0);
  CHECK(observation_moment(ones, 2) == Approx(1.0).epsilon(1e-12));
  CHECK(observation_moment(ones, 1) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("observation_atoms form a distribution") {
  SplitMix64 rng(9);
  for (int rep = 0; rep < 500; ++rep) {
    const auto arm = random_arm(rng, 12);
    const auto atoms = observation_atoms(arm);
    REQUIRE(atoms.size() == arm.size());
    double total = 0.0;
    for (const auto& [x, p] : atoms) {
      REQUIRE(p >= 0.0);
      total += p;
    }
    REQUIRE(total == Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(observation_atoms(std::vector<double>{}), BadDistribution);
  CHECK_THROWS_AS(observation_atoms(std::vector<double>(26, 0.5)), ArmTooLong);
  CHECK_THROWS_AS(
      brute_force_observation_oracle(std::vector<double>(21, 0.5), 1),
      ArmTooLong);
}

TEST_CASE("closed forms agree with the brute-force oracle") {
  CHECK(brute_force_observation_oracle(std::vector<double>{0.5, 0.5}, 1) ==
        Approx(1.5).epsilon(1e-12));
  CHECK(brute_force_observation_oracle(std::vector<double>{0.9, 0.1}, 1) ==
        Approx(1.1).epsilon(1e-12));
  CHECK(brute_force_observation_oracle(std::vector<double>{0.42}, 1) == 1.0);

  SplitMix64 rng(31337);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto arm = random_arm(rng, 12);
    const double bf1 = brute_force_observation_oracle(arm, 1);
    const double bf2 = brute_force_observation_oracle(arm, 2);
    REQUIRE(std::abs(expected_observations(arm) - bf1) < 1e-12);
    REQUIRE(std::abs(observation_moment(arm, 1) - bf1) < 1e-12);
    REQUIRE(std::abs(observation_moment(arm, 2) - bf2) < 1e-12);
  }
}

TEST_CASE("second moment bounded by min{k^2, 2/w_min^2}") {
  SplitMix64 rng(77);
  for (int rep = 0; rep < 2000; ++rep) {
    auto arm = random_arm(rng, 12);
    for (double& x : arm)
      x = 0.01 + 0.99 * x; // keep w' positive
    const double k = static_cast<double>(arm.size());
    const double wmin = *std::min_element(arm.begin(), arm.end());
    const double cap = std::min(k * k, 2.0 / (wmin * wmin));
    REQUIRE(observation_moment(arm, 2) <= cap + 1e-12);
  }
}

TEST_CASE("boundedness: decreasing order minimizes, increasing maximizes") {
  SplitMix64 rng(4242);
  for (int rep = 0; rep < 100; ++rep) {
    auto arm = random_arm(rng, 6);
    std::sort(arm.begin(), arm.end(), std::greater<>());
    const double lo = expected_observations(arm);
    std::vector<double> asc(arm.rbegin(), arm.rend());
    const double hi = expected_observations(asc);
    auto perm = arm;
    std::sort(perm.begin(), perm.end());
    do {
      const double mid = expected_observations(perm);
      REQUIRE(lo <= mid + 1e-12);
      REQUIRE(mid <= hi + 1e-12);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("monotonicity: raising a weight does not increase E X") {
  SplitMix64 rng(515);
  for (int rep = 0; rep < 2000; ++rep) {
    auto arm = random_arm(rng, 8);
    const double base = expected_observations(arm);
    const std::size_t j = rng() % arm.size();
    auto raised = arm;
    raised[j] = raised[j] + (1.0 - raised[j]) * rng.uniform01();
    REQUIRE(expected_observations(raised) <= base + 1e-12);
  }
}
