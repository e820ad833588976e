#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cascadebai/errors.hpp"
#include "cascadebai/instance.hpp"

namespace cascadebai {

/// mu(k, w): expected observations when the k largest weights are pulled
/// in decreasing order. Lower-bounds E X for any pull of k survivors.
inline double mu_lower(int k, std::span<const double> sorted_desc) {
  double sum = 0.0;
  double no_click = 1.0;
  for (int i = 1; i < k; ++i) {
    sum += static_cast<double>(i) * sorted_desc[i - 1] * no_click;
    no_click *= 1.0 - sorted_desc[i - 1];
  }
  return sum + static_cast<double>(k) * no_click;
}

/// mu~(k, w): expected observations when the k smallest weights are
/// pulled in increasing order. Upper-bounds E X.
inline double mu_upper(int k, std::span<const double> sorted_desc) {
  const int L = static_cast<int>(sorted_desc.size());
  double sum = 0.0;
  double no_click = 1.0;
  for (int i = 1; i < k; ++i) {
    sum += static_cast<double>(i) * sorted_desc[L - i] * no_click;
    no_click *= 1.0 - sorted_desc[L - i];
  }
  return sum + static_cast<double>(k) * no_click;
}

/// Analytic floor min{k/2, 1/(2 w*)} of mu_lower.
inline double mu_floor(int k, double w_max) {
  return std::min(0.5 * k, 0.5 / w_max);
}

/// v_k = min{k, sqrt(2)/w'}; v_k^2 upper-bounds E X^2.
inline double v_param(int k, double w_min) {
  if (w_min <= 0.0)
    throw ZeroMinWeight("v parameter needs a positive minimum weight");
  return std::min(static_cast<double>(k), std::sqrt(2.0) / w_min);
}

inline double kl_bernoulli(double p, double q) {
  if (!(q > 0.0 && q < 1.0))
    throw DegenerateQ("KL reference must lie in (0,1)");
  double kl = 0.0;
  if (p > 0.0)
    kl += p * std::log(p / q);
  if (p < 1.0)
    kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return kl;
}

/// Optimal-expected-time lower bound; stated for exact identification only.
inline double lower_bound(const Instance& inst) {
  if (inst.epsilon != 0.0)
    throw EpsilonNotZero("the lower bound is stated for epsilon = 0");
  const int K = inst.K, L = inst.L();
  if (K >= L)
    throw BadInstance("lower bound needs K < L");
  const auto& w = inst.weights;
  const double mu_t = mu_upper(K, w);
  double sum = 0.0;
  for (int i = 0; i < K; ++i)
    sum += 1.0 / kl_bernoulli(w[i], w[K]);
  for (int j = K; j < L; ++j)
    sum += 1.0 / kl_bernoulli(w[j], w[K - 1]);
  return std::log(1.0 / (2.4 * inst.delta)) / mu_t * sum;
}

/// Corollary form of the lower bound under the two-probability family.
inline double lower_bound_two_prob(const Instance& inst) {
  if (inst.epsilon != 0.0)
    throw EpsilonNotZero("the lower bound is stated for epsilon = 0");
  const int K = inst.K, L = inst.L();
  if (K >= L)
    throw BadInstance("lower bound needs K < L");
  const double ws = inst.w_max(), wp = inst.w_min();
  const double mu_t = (1.0 - std::pow(1.0 - wp, K)) / wp;
  return kl_bernoulli(1.0 - inst.delta, inst.delta) / mu_t *
         (K / kl_bernoulli(ws, wp) + (L - K) / kl_bernoulli(wp, ws));
}

enum class Regime { KPrimeLt2Km1, KPrimeGe2Km1 };

/// Every analytic quantity behind the time-complexity theorems for one
/// instance. In the KPrimeGe2Km1 regime n1/n2 carry the primed terms and
/// the n3 fields are absent. `n3` is the telescoping sum; `n3_expanded`
/// is the expanded form as stated alongside it (an upper bound of the
/// telescoping form; the two are not numerically identical in general).
struct BoundReport {
  Regime regime = Regime::KPrimeLt2Km1;
  double n1 = 0.0;
  double n2 = 0.0;
  std::optional<double> n3;
  std::optional<double> n3_expanded;
  int k1 = 0;
  int k2 = 0;
  std::vector<double> m;        // M_k for k = 1..K-1
  std::vector<double> mu;       // mu_k, k = 1..K (0-based storage)
  std::vector<double> mu_tilde; // mu~_k
  std::vector<double> v;        // v_k
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
};

inline BoundReport upper_bound_terms(const Instance& inst,
                                     const GapProfile& g) {
  const int K = inst.K, L = inst.L();
  const int Kp = g.k_prime;
  const auto& w = inst.weights;

  BoundReport r;
  r.mu.resize(K);
  r.mu_tilde.resize(K);
  r.v.resize(K);
  for (int k = 1; k <= K; ++k) {
    r.mu[k - 1] = mu_lower(k, w);
    r.mu_tilde[k - 1] = mu_upper(k, w);
    // min{k, sqrt(2)/w'} degenerates to k as w' -> 0
    r.v[k - 1] = w.back() > 0.0 ? v_param(k, w.back()) : static_cast<double>(k);
  }
  auto mu_at = [&](int k) { return r.mu[k - 1]; };
  auto v_at = [&](int k) { return r.v[k - 1]; };

  r.k1 = std::max(Kp - K,
                  std::min(static_cast<int>(std::floor(1.0 / w.front())),
                           K - 1));
  r.k2 = std::max(Kp - K, 1);
  r.m.resize(K >= 2 ? K - 1 : 0);
  for (int k = 1; k <= K - 1; ++k)
    r.m[k - 1] =
        (K + 1 - k) / mu_at(K + 1 - k) - (K - k) / mu_at(K - k);

  auto tbar_sigma = [&](int i) { // 1-based position in the sigma order
    return static_cast<double>(g.thresholds[g.sigma[i - 1]]);
  };

  if (Kp >= 2 * K - 1) {
    r.regime = Regime::KPrimeGe2Km1;
    const double vK = v_at(K), muK = mu_at(K);
    r.n1 = 2.0 * vK * vK / (muK * muK) * std::log(2.0 / inst.delta);
    double sum = 0.0;
    for (int i = 1; i <= L - Kp + K - 1; ++i)
      sum += tbar_sigma(i);
    sum += (Kp - K + 1) * tbar_sigma(L - Kp + K);
    sum += Kp - K;
    r.n2 = 2.0 / muK * sum;
    return r;
  }

  r.regime = Regime::KPrimeLt2Km1;

  double ratio_sum = 0.0;
  for (int j = 1; j <= K - r.k2; ++j) {
    const double c = v_at(K - j + 1) / mu_at(K - j + 1);
    ratio_sum += c * c;
  }
  r.n1 = ratio_sum * std::log(ratio_sum / inst.delta);

  double t_sum = 0.0;
  for (int i = 1; i <= L - K; ++i)
    t_sum += tbar_sigma(i);
  r.n2 = t_sum / mu_at(K);

  auto b = [&](int k) { return tbar_sigma(L - K + k); };
  double n3 = 0.0;
  for (int k = 2; k <= 2 * K - Kp; ++k)
    n3 += (K - k + 1) / mu_at(K - k + 1) * (b(k) - b(k - 1));
  r.n3 = n3;

  double n3e = 0.0;
  for (int k = 1; k <= K - r.k1 - 1; ++k)
    n3e += r.m[k - 1] * b(k);
  n3e += ((r.k1 + 1) / mu_at(r.k1 + 1) - 2.0) * b(K - r.k1);
  n3e += 2.0 * b(K - r.k2);
  r.n3_expanded = n3e;

  if (inst.epsilon == 0.0 && K < L)
    r.lower_bound = lower_bound(inst);
  return r;
}

struct LsgResult {
  bool pass = true;
  double max_violation = 0.0;
  double worst_lambda = 0.0;
};

/// 40 grid points, magnitudes log-spaced in [1e-3, 1e2], all negative.
inline std::vector<double> default_lambda_grid() {
  std::vector<double> grid(40);
  for (int i = 0; i < 40; ++i)
    grid[i] = -std::pow(10.0, -3.0 + 5.0 * i / 39.0);
  return grid;
}

/// Checks E[exp(lambda (X - EX))] <= exp(v^2 lambda^2 / 2) pointwise on
/// the grid, with the MGF computed exactly over the atoms.
inline LsgResult lsg_check(std::span<const std::pair<double, double>> atoms,
                           double v, std::span<const double> lambda_grid) {
  double total = 0.0, mean = 0.0;
  for (const auto& [x, p] : atoms) {
    if (p < 0.0)
      throw BadDistribution("negative atom probability");
    total += p;
    mean += x * p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw BadDistribution("atom probabilities must sum to 1");
  for (double lam : lambda_grid)
    if (lam > 0.0)
      throw BadDistribution("lambda grid must be nonpositive");

  LsgResult res;
  for (double lam : lambda_grid) {
    double mgf = 0.0;
    for (const auto& [x, p] : atoms)
      mgf += p * std::exp(lam * (x - mean));
    const double gap = mgf - std::exp(0.5 * v * v * lam * lam);
    if (gap > res.max_violation) {
      res.max_violation = gap;
      res.worst_lambda = lam;
    }
  }
  res.pass = res.max_violation <= 1e-12;
  return res;
}

} // namespace cascadebai
