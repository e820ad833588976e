#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cascadebai/errors.hpp"

namespace cascadebai {

/// A problem instance in canonical form: weights sorted nonincreasing,
/// `original_index[j]` giving the position of canonical item j in the
/// user-supplied order. Immutable after `validate`.
struct Instance {
  std::vector<double> weights; // nonincreasing once canonical
  int K = 1;
  double epsilon = 0.0;
  double delta = 0.1;
  std::vector<int> original_index;

  int L() const { return static_cast<int>(weights.size()); }
  double w_max() const { return weights.front(); }
  double w_min() const { return weights.back(); }
};

inline double rho(double delta, int L) {
  if (!(delta > 0.0 && delta < 1.0))
    throw BadDelta("delta must lie in (0,1)");
  return std::sqrt(delta / (12.0 * static_cast<double>(L)));
}

/// Observations needed to identify an item whose adjusted gap is
/// `bar_delta`, at risk `delta` over `L` items.
inline long long threshold(double bar_delta, double delta, int L) {
  if (!(bar_delta > 0.0))
    throw NonPositiveGap("adjusted gap must be positive");
  const double r = rho(delta, L);
  const double d2 = bar_delta * bar_delta;
  const double inner = (2.0 / r) * std::log2(648.0 / (r * d2));
  return 1 + static_cast<long long>(std::floor(216.0 / d2 * std::log(inner)));
}

/// Checks the standing assumptions and returns the canonical instance.
inline Instance validate(Instance in) {
  const int L = static_cast<int>(in.weights.size());
  if (L == 0)
    throw EmptyWeights("weight vector is empty");
  if (L < 2)
    throw BadInstance("need at least two items");
  if (in.K < 1 || in.K > L)
    throw BadInstance("K must satisfy 1 <= K <= L");
  if (!(in.delta > 0.0 && in.delta < 1.0))
    throw BadDelta("delta must lie in (0,1)");
  if (in.epsilon < 0.0)
    throw BadInstance("epsilon must be nonnegative");
  for (double w : in.weights)
    if (!(w >= 0.0 && w <= 1.0))
      throw WeightOutOfRange("weights must lie in [0,1]");

  std::vector<int> order(in.weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return in.weights[a] > in.weights[b];
  });
  std::vector<double> sorted(in.weights.size());
  for (std::size_t j = 0; j < order.size(); ++j)
    sorted[j] = in.weights[order[j]];

  if (in.K < L && !(sorted[in.K - 1] > sorted[in.K]))
    throw DegenerateBoundary("w(K) must strictly exceed w(K+1)");

  in.weights = std::move(sorted);
  in.original_index = std::move(order);
  return in;
}

/// Number of epsilon-optimal items: max{i : w(i) >= w(K) - eps}, 1-based.
inline int k_prime_of(const Instance& inst) {
  const double cut = inst.weights[inst.K - 1] - inst.epsilon;
  int kp = inst.K;
  for (int i = inst.K; i < inst.L(); ++i)
    if (inst.weights[i] >= cut) kp = i + 1;
  return kp;
}

/// Gap structure of a canonical instance: raw gaps, epsilon-adjusted gaps,
/// the permutation sorting the adjusted gaps nonincreasing, and the
/// per-item observation thresholds at the instance's own delta.
struct GapProfile {
  std::vector<double> deltas;
  std::vector<double> bar_deltas;
  int k_prime = 0;
  std::vector<int> sigma; // 0-based permutation, bar_deltas[sigma] nonincreasing
  std::vector<long long> thresholds;
};

inline GapProfile gaps(const Instance& inst) {
  const int L = inst.L();
  const int K = inst.K;
  const auto& w = inst.weights;
  GapProfile g;
  g.deltas.resize(L);
  g.bar_deltas.resize(L);
  g.k_prime = k_prime_of(inst);

  // Raw gaps are defined in terms of w(K+1), which needs K < L. For K = L the
  // reject side is empty and every Delta_i uses the boundary w(K).
  for (int i = 0; i < L; ++i) {
    if (i < K)
      g.deltas[i] = (K < L) ? w[i] - w[K] : w[i] - w[K - 1];
    else
      g.deltas[i] = w[K - 1] - w[i];
  }
  for (int i = 0; i < L; ++i) {
    if (i < K)
      g.bar_deltas[i] = g.deltas[i] + inst.epsilon;
    else if (i < g.k_prime)
      g.bar_deltas[i] = g.deltas[K - 1] - g.deltas[i] + inst.epsilon;
    else
      g.bar_deltas[i] = g.deltas[i] - inst.epsilon;
  }

  g.sigma.resize(L);
  std::iota(g.sigma.begin(), g.sigma.end(), 0);
  std::stable_sort(g.sigma.begin(), g.sigma.end(), [&](int a, int b) {
    return g.bar_deltas[a] > g.bar_deltas[b];
  });

  g.thresholds.resize(L);
  for (int i = 0; i < L; ++i)
    g.thresholds[i] = threshold(g.bar_deltas[i], inst.delta, L);
  return g;
}

/// Instance generators mirroring the experiment families.
inline Instance make_two_prob(double w_star, double w_prime, int K, int L,
                              double eps = 0.0, double delta = 0.1) {
  if (!(w_prime < w_star))
    throw BadInstance("two-probability generator needs w' < w*");
  Instance inst;
  inst.weights.assign(L, w_prime);
  std::fill(inst.weights.begin(), inst.weights.begin() + K, w_star);
  inst.K = K;
  inst.epsilon = eps;
  inst.delta = delta;
  return validate(std::move(inst));
}

inline Instance make_linspace(double w_max, double w_min, int L, int K,
                              double eps = 0.0, double delta = 0.1) {
  if (L < 2)
    throw BadInstance("linspace generator needs L >= 2");
  Instance inst;
  inst.weights.resize(L);
  for (int i = 0; i < L; ++i)
    inst.weights[i] =
        w_max + (w_min - w_max) * static_cast<double>(i) / (L - 1);
  inst.K = K;
  inst.epsilon = eps;
  inst.delta = delta;
  return validate(std::move(inst));
}

} // namespace cascadebai
