#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "cascadebai/errors.hpp"
#include "cascadebai/rng.hpp"

namespace cascadebai {

/// One step's censored feedback. `click_position` is 1-based within the
/// pulled arm; 0 means no click. `observed_count` equals the click
/// position, or the arm length when nothing was clicked.
struct CascadeFeedback {
  int click_position = 0;
  int observed_count = 0;

  bool clicked() const { return click_position != 0; }
};

/// Simulates one cascade: Bernoulli draws in the given order until the
/// first click or the end of the arm.
template <class Rng>
CascadeFeedback cascade_step(std::span<const double> weights_in_order,
                             Rng& rng) {
  const int k = static_cast<int>(weights_in_order.size());
  for (int j = 0; j < k; ++j) {
    if (rng.uniform01() < weights_in_order[j])
      return {j + 1, j + 1};
  }
  return {0, k};
}

/// E X for an ordered arm, by the closed-form sum over click positions.
inline double expected_observations(std::span<const double> weights) {
  const int k = static_cast<int>(weights.size());
  double sum = 0.0;
  double no_click = 1.0; // prob of no click among the first i-1 items
  for (int i = 1; i < k; ++i) {
    sum += static_cast<double>(i) * weights[i - 1] * no_click;
    no_click *= 1.0 - weights[i - 1];
  }
  return sum + static_cast<double>(k) * no_click;
}

inline constexpr int kMaxAtomArm = 25;
inline constexpr int kMaxBruteForceArm = 20;

/// The k atoms of the observation count: P(X=j) for j = 1..k.
inline std::vector<std::pair<double, double>>
observation_atoms(std::span<const double> weights) {
  const int k = static_cast<int>(weights.size());
  if (k == 0)
    throw BadDistribution("empty arm");
  if (k > kMaxAtomArm)
    throw ArmTooLong("atom enumeration capped at 25 items");
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(k);
  double no_click = 1.0;
  for (int j = 1; j < k; ++j) {
    atoms.emplace_back(static_cast<double>(j), weights[j - 1] * no_click);
    no_click *= 1.0 - weights[j - 1];
  }
  atoms.emplace_back(static_cast<double>(k), no_click);
  return atoms;
}

/// E X^power via atom enumeration, power in {1, 2}.
inline double observation_moment(std::span<const double> weights, int power) {
  double m = 0.0;
  for (const auto& [x, p] : observation_atoms(weights))
    m += (power == 2 ? x * x : x) * p;
  return m;
}

/// Independent oracle: enumerate all 2^k Bernoulli outcome vectors,
/// weight each by its probability, and read off X directly. Test use only.
inline double brute_force_observation_oracle(std::span<const double> weights,
                                             int power) {
  const int k = static_cast<int>(weights.size());
  if (k > kMaxBruteForceArm)
    throw ArmTooLong("brute-force oracle capped at 20 items");
  double m = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    double p = 1.0;
    int x = k;
    for (int j = 0; j < k; ++j) {
      const bool click = (mask >> j) & 1u;
      p *= click ? weights[j] : 1.0 - weights[j];
      if (click && j + 1 < x)
        x = j + 1;
    }
    m += p * (power == 2 ? static_cast<double>(x) * x : static_cast<double>(x));
  }
  return m;
}

} // namespace cascadebai
