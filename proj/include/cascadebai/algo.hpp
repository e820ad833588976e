#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cascadebai/env.hpp"
#include "cascadebai/errors.hpp"
#include "cascadebai/instance.hpp"
#include "cascadebai/rng.hpp"

namespace cascadebai {

enum class Ordering {
  TCountAsc, // the algorithm as stated: least observed first
  EmpAsc,
  EmpDesc,
  UcbAsc,
  UcbDesc,
  LcbAsc,
  LcbDesc,
};

inline const char* to_string(Ordering o) {
  switch (o) {
  case Ordering::TCountAsc: return "tcount";
  case Ordering::EmpAsc: return "emp-asc";
  case Ordering::EmpDesc: return "emp-desc";
  case Ordering::UcbAsc: return "ucb-asc";
  case Ordering::UcbDesc: return "ucb-desc";
  case Ordering::LcbAsc: return "lcb-asc";
  case Ordering::LcbDesc: return "lcb-desc";
  }
  return "?";
}

inline Ordering ordering_from_string(const std::string& s) {
  for (Ordering o : {Ordering::TCountAsc, Ordering::EmpAsc, Ordering::EmpDesc,
                     Ordering::UcbAsc, Ordering::UcbDesc, Ordering::LcbAsc,
                     Ordering::LcbDesc})
    if (s == to_string(o)) return o;
  throw BadInstance("unknown ordering: " + s);
}

/// Main-text radius divides by T; the appendix proof divides by T+1.
enum class RadiusForm { MainText, Appendix };

inline double confidence_radius(long long T, double rho,
                                RadiusForm form = RadiusForm::MainText) {
  if (T <= 0)
    return std::numeric_limits<double>::infinity();
  const double t = static_cast<double>(T);
  const double denom = form == RadiusForm::Appendix ? t + 1.0 : t;
  return 4.0 * std::sqrt(std::log(std::log2(2.0 * t) / rho) / denom);
}

enum class StopReason { SurvivalEmpty, AcceptFull, RejectFull, StepCapHit };

inline const char* to_string(StopReason r) {
  switch (r) {
  case StopReason::SurvivalEmpty: return "survival_empty";
  case StopReason::AcceptFull: return "accept_full";
  case StopReason::RejectFull: return "reject_full";
  case StopReason::StepCapHit: return "step_cap_hit";
  }
  return "?";
}

struct RunConfig {
  Ordering ordering = Ordering::TCountAsc;
  long long max_steps = 10'000'000;
  RadiusForm radius_form = RadiusForm::MainText;
  std::uint64_t seed = 0;
};

struct RunResult {
  std::vector<int> recommended; // canonical item indices, 0-based
  long long steps = 0;
  bool success = false;
  long long total_observations = 0;
  std::vector<long long> per_item_obs;
  StopReason stop_reason = StopReason::StepCapHit;
};

/// The evolving racing state shared by CascadeBAI and the semi-bandit
/// baseline. D/A/R partition [L]; counts and empirical means cover all
/// items but are only advanced for surviving ones.
class AlgState {
public:
  AlgState(const Instance& inst, RadiusForm form)
      : inst_(&inst), form_(form), rho_(rho(inst.delta, inst.L())),
        status_(inst.L(), kSurviving), obs_count_(inst.L(), 0),
        emp_mean_(inst.L(), 0.0),
        radius_(inst.L(), std::numeric_limits<double>::infinity()) {
    survival_.resize(inst.L());
    for (int i = 0; i < inst.L(); ++i)
      survival_[i] = i;
  }

  const std::vector<int>& survival() const { return survival_; }
  const std::vector<int>& accepted() const { return accepted_; }
  const std::vector<int>& rejected() const { return rejected_; }
  const std::vector<long long>& obs_count() const { return obs_count_; }
  const std::vector<double>& emp_mean() const { return emp_mean_; }
  long long step() const { return step_; }
  long long total_observations() const { return total_observations_; }
  int k_t() const { return inst_->K - static_cast<int>(accepted_.size()); }

  bool terminated() const {
    return survival_.empty() ||
           static_cast<int>(accepted_.size()) >= inst_->K ||
           static_cast<int>(rejected_.size()) >= inst_->L() - inst_->K;
  }

  /// One while-loop iteration of the cascading algorithm.
  template <class Rng>
  void cascade_bai_step(Ordering ordering, Rng& rng) {
    if (terminated())
      throw InvalidState("step called after termination");
    const int K = inst_->K;
    const int nd = static_cast<int>(survival_.size());
    const int m = std::min(K, nd);

    select_survivors(ordering, m);
    // Pad the arm's tail with the smallest-index identified items; their
    // outcomes are observed but discarded.
    arm_.assign(selected_.begin(), selected_.begin() + m);
    for (int i = 0; static_cast<int>(arm_.size()) < K; ++i)
      if (status_[i] != kSurviving)
        arm_.push_back(i);

    // Simulate the cascade directly over the arm.
    int click_pos = 0;
    const int arm_len = static_cast<int>(arm_.size());
    for (int j = 0; j < arm_len; ++j) {
      if (rng.uniform01() < inst_->weights[arm_[j]]) {
        click_pos = j + 1;
        break;
      }
    }
    const int observed = click_pos != 0 ? click_pos : arm_len;
    total_observations_ += observed;

    for (int j = 0; j < observed; ++j) {
      const int i = arm_[j];
      if (status_[i] != kSurviving)
        continue;
      const double w_draw = (j + 1 == click_pos) ? 1.0 : 0.0;
      const double t = static_cast<double>(obs_count_[i]);
      emp_mean_[i] = (t * emp_mean_[i] + w_draw) / (t + 1.0);
      ++obs_count_[i];
      radius_[i] = confidence_radius(obs_count_[i], rho_, form_);
    }

    eliminate(inst_->epsilon);
    ++step_;
    assert(check_partition());
  }

  /// One step of BatchRacing with b items pulled and all of them
  /// observed (semi-bandit feedback); elimination uses epsilon = 0.
  template <class Rng>
  void batch_racing_step(int b, Rng& rng) {
    if (terminated())
      throw InvalidState("step called after termination");
    const int nd = static_cast<int>(survival_.size());
    const int m = std::min(b, nd);
    select_survivors(Ordering::TCountAsc, m);
    total_observations_ += m;
    for (int j = 0; j < m; ++j) {
      const int i = selected_[j];
      const double w_draw = rng.uniform01() < inst_->weights[i] ? 1.0 : 0.0;
      const double t = static_cast<double>(obs_count_[i]);
      emp_mean_[i] = (t * emp_mean_[i] + w_draw) / (t + 1.0);
      ++obs_count_[i];
      radius_[i] = confidence_radius(obs_count_[i], rho_, form_);
    }
    eliminate(0.0);
    ++step_;
    assert(check_partition());
  }

  /// Recommendation per the stopping rule: the first K accepted items,
  /// or the accepted ones topped up with survivors by empirical mean.
  std::vector<int> recommend() const {
    const int K = inst_->K;
    std::vector<int> rec;
    if (static_cast<int>(accepted_.size()) >= K) {
      rec.assign(accepted_.begin(), accepted_.begin() + K);
      return rec;
    }
    rec = accepted_;
    std::vector<int> rest = survival_;
    std::sort(rest.begin(), rest.end(), [&](int a, int b) {
      if (emp_mean_[a] != emp_mean_[b]) return emp_mean_[a] > emp_mean_[b];
      return a < b;
    });
    for (int i : rest) {
      if (static_cast<int>(rec.size()) >= K)
        break;
      rec.push_back(i);
    }
    return rec;
  }

  StopReason stop_reason(long long max_steps) const {
    if (static_cast<int>(accepted_.size()) >= inst_->K)
      return StopReason::AcceptFull;
    if (survival_.empty())
      return StopReason::SurvivalEmpty;
    if (static_cast<int>(rejected_.size()) >= inst_->L() - inst_->K)
      return StopReason::RejectFull;
    (void)max_steps;
    return StopReason::StepCapHit;
  }

  bool check_partition() const {
    if (survival_.size() + accepted_.size() + rejected_.size() !=
        static_cast<std::size_t>(inst_->L()))
      return false;
    for (std::size_t j = 0; j < emp_mean_.size(); ++j) {
      const double clicks = emp_mean_[j] * static_cast<double>(obs_count_[j]);
      if (std::abs(clicks - std::round(clicks)) > 1e-6)
        return false;
    }
    return true;
  }

private:
  static constexpr char kSurviving = 0, kAccepted = 1, kRejected = 2;

  void select_survivors(Ordering ordering, int m) {
    selected_ = survival_;
    auto by = [&](auto key) {
      std::partial_sort(selected_.begin(), selected_.begin() + m,
                        selected_.end(), [&, key](int a, int b) {
                          const auto ka = key(a), kb = key(b);
                          if (ka != kb) return ka < kb;
                          return a < b;
                        });
    };
    switch (ordering) {
    case Ordering::TCountAsc:
      by([&](int i) { return static_cast<double>(obs_count_[i]); });
      break;
    case Ordering::EmpAsc:
      by([&](int i) { return emp_mean_[i]; });
      break;
    case Ordering::EmpDesc:
      by([&](int i) { return -emp_mean_[i]; });
      break;
    case Ordering::UcbAsc:
      by([&](int i) { return emp_mean_[i] + radius_[i]; });
      break;
    case Ordering::UcbDesc:
      by([&](int i) { return -(emp_mean_[i] + radius_[i]); });
      break;
    case Ordering::LcbAsc:
      by([&](int i) { return emp_mean_[i] - radius_[i]; });
      break;
    case Ordering::LcbDesc:
      by([&](int i) { return -(emp_mean_[i] - radius_[i]); });
      break;
    }
  }

  void eliminate(double epsilon) {
    // No elimination while any survivor is unobserved: its infinite
    // radius stands in for C(0) = +infinity.
    for (int i : survival_)
      if (obs_count_[i] == 0)
        return;

    // Cheap screen: accepting any i needs L(i) > U(j*) - eps and
    // rejecting needs U(i) < L(j') - eps, both of which imply
    // max L > min U - eps over the survivors. Skip the sorts otherwise.
    double max_lcb = -std::numeric_limits<double>::infinity();
    double min_ucb = std::numeric_limits<double>::infinity();
    for (int i : survival_) {
      max_lcb = std::max(max_lcb, emp_mean_[i] - radius_[i]);
      min_ucb = std::min(min_ucb, emp_mean_[i] + radius_[i]);
    }
    if (max_lcb <= min_ucb - epsilon)
      return;

    const int kt = k_t();
    // j*: (kt+1)-th largest empirical mean among survivors; j': kt-th.
    scratch_ = survival_;
    if (static_cast<int>(scratch_.size()) < kt + 1)
      return; // cannot happen while the loop conditions hold
    std::partial_sort(scratch_.begin(), scratch_.begin() + kt + 1,
                      scratch_.end(), [&](int a, int b) {
                        if (emp_mean_[a] != emp_mean_[b])
                          return emp_mean_[a] > emp_mean_[b];
                        return a < b;
                      });
    const int j_star = scratch_[kt];
    const int j_prime = scratch_[kt - 1];
    const double u_star = emp_mean_[j_star] + radius_[j_star];
    const double l_prime = emp_mean_[j_prime] - radius_[j_prime];

    new_accepts_.clear();
    new_rejects_.clear();
    for (int i : survival_) {
      const double lcb = emp_mean_[i] - radius_[i];
      const double ucb = emp_mean_[i] + radius_[i];
      if (lcb > u_star - epsilon)
        new_accepts_.push_back(i);
      else if (ucb < l_prime - epsilon)
        new_rejects_.push_back(i);
    }
    if (new_accepts_.empty() && new_rejects_.empty())
      return;
    // survival_ is kept in ascending index order, so intra-step
    // insertion into A is ascending by item index as well.
    for (int i : new_accepts_) {
      status_[i] = kAccepted;
      accepted_.push_back(i);
    }
    for (int i : new_rejects_) {
      status_[i] = kRejected;
      rejected_.push_back(i);
    }
    std::erase_if(survival_, [&](int i) { return status_[i] != kSurviving; });
  }

  const Instance* inst_;
  RadiusForm form_;
  double rho_;
  std::vector<char> status_;
  std::vector<int> survival_; // ascending index order
  std::vector<int> accepted_; // insertion order
  std::vector<int> rejected_;
  std::vector<long long> obs_count_;
  std::vector<double> emp_mean_;
  std::vector<double> radius_;
  long long step_ = 0;
  long long total_observations_ = 0;
  std::vector<int> selected_, arm_, scratch_, new_accepts_, new_rejects_;
};

namespace detail {

inline RunResult finish(const AlgState& state, const Instance& inst,
                        long long max_steps, bool capped) {
  RunResult res;
  res.steps = state.step();
  res.total_observations = state.total_observations();
  res.per_item_obs = state.obs_count();
  res.stop_reason =
      capped ? StopReason::StepCapHit : state.stop_reason(max_steps);
  res.recommended = state.recommend();
  const int kp = k_prime_of(inst);
  res.success = static_cast<int>(res.recommended.size()) == inst.K;
  for (int i : res.recommended)
    if (i >= kp)
      res.success = false;
  return res;
}

} // namespace detail

inline RunResult run_cascade_bai(const Instance& inst,
                                 const RunConfig& config) {
  AlgState state(inst, config.radius_form);
  SplitMix64 rng(config.seed);
  while (!state.terminated() && state.step() < config.max_steps)
    state.cascade_bai_step(config.ordering, rng);
  return detail::finish(state, inst, config.max_steps, !state.terminated());
}

inline RunResult run_batch_racing(const Instance& inst, int b,
                                  const RunConfig& config) {
  if (b < 1 || b > inst.L())
    throw BadInstance("batch size must satisfy 1 <= b <= L");
  AlgState state(inst, config.radius_form);
  SplitMix64 rng(config.seed);
  while (!state.terminated() && state.step() < config.max_steps)
    state.batch_racing_step(b, rng);
  return detail::finish(state, inst, config.max_steps, !state.terminated());
}

} // namespace cascadebai
