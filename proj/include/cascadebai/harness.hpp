#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cascadebai/algo.hpp"
#include "cascadebai/bounds.hpp"
#include "cascadebai/errors.hpp"
#include "cascadebai/instance.hpp"
#include "cascadebai/rng.hpp"

namespace cascadebai {

struct AlgoSpec {
  std::string algo = "cascade"; // "cascade" or "batrac"
  int b = 1;                    // items per step for batrac
  Ordering ordering = Ordering::TCountAsc;
  long long max_steps = 10'000'000;
  RadiusForm radius_form = RadiusForm::MainText;
};

struct TrialRecord {
  long long trial_id = 0;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::string ordering;
  int L = 0;
  int K = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  long long steps = 0;
  int success = 0;
  long long total_observations = 0;
  std::string stop_reason;
};

inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr); // shortest round-trip form
}

inline std::string csv_header() {
  return "trial_id,seed,algorithm,ordering,L,K,delta,epsilon,steps,success,"
         "total_observations,stop_reason\n";
}

inline std::string to_csv_row(const TrialRecord& r) {
  std::string out;
  out += std::to_string(r.trial_id);
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += r.algorithm;
  out += ',';
  out += r.ordering;
  out += ',';
  out += std::to_string(r.L);
  out += ',';
  out += std::to_string(r.K);
  out += ',';
  out += format_double(r.delta);
  out += ',';
  out += format_double(r.epsilon);
  out += ',';
  out += std::to_string(r.steps);
  out += ',';
  out += std::to_string(r.success);
  out += ',';
  out += std::to_string(r.total_observations);
  out += ',';
  out += r.stop_reason;
  out += '\n';
  return out;
}

inline std::string to_csv(const std::vector<TrialRecord>& records) {
  std::string out = csv_header();
  for (const auto& r : records)
    out += to_csv_row(r);
  return out;
}

inline RunResult run_one(const Instance& inst, const AlgoSpec& spec,
                         std::uint64_t seed) {
  RunConfig config;
  config.ordering = spec.ordering;
  config.max_steps = spec.max_steps;
  config.radius_form = spec.radius_form;
  config.seed = seed;
  if (spec.algo == "cascade")
    return run_cascade_bai(inst, config);
  if (spec.algo == "batrac")
    return run_batch_racing(inst, spec.b, config);
  throw BadInstance("unknown algorithm: " + spec.algo);
}

/// Runs n seeded trials; record i is a pure function of (inst, spec,
/// master_seed, i), so the output is identical at any parallelism.
inline std::vector<TrialRecord> run_trials(const Instance& inst,
                                           const AlgoSpec& spec, int n_trials,
                                           std::uint64_t master_seed,
                                           int parallelism = 1) {
  if (n_trials < 1)
    throw BadInstance("n_trials must be >= 1");
  std::vector<TrialRecord> records(n_trials);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n_trials; i = next.fetch_add(1)) {
      const RngSpec rng_spec{master_seed, static_cast<std::uint64_t>(i)};
      const std::uint64_t seed = rng_spec.stream_seed();
      const RunResult res = run_one(inst, spec, seed);
      TrialRecord& r = records[i];
      r.trial_id = i;
      r.seed = seed;
      r.algorithm = spec.algo == "batrac"
                        ? "batrac(" + std::to_string(spec.b) + ")"
                        : "cascade";
      r.ordering = to_string(spec.ordering);
      r.L = inst.L();
      r.K = inst.K;
      r.delta = inst.delta;
      r.epsilon = inst.epsilon;
      r.steps = res.steps;
      r.success = res.success ? 1 : 0;
      r.total_observations = res.total_observations;
      r.stop_reason = to_string(res.stop_reason);
    }
  };
  if (parallelism <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < parallelism; ++t)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }
  return records;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd ms;
  if (xs.empty())
    return ms;
  for (double x : xs)
    ms.mean += x;
  ms.mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs)
    ss += (x - ms.mean) * (x - ms.mean);
  ms.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
  return ms;
}

inline MeanStd mean_steps(const std::vector<TrialRecord>& records) {
  std::vector<double> xs;
  xs.reserve(records.size());
  for (const auto& r : records)
    xs.push_back(static_cast<double>(r.steps));
  return mean_std(xs);
}

enum class FitModel { LinearInK, QuadraticInK };

inline const char* to_string(FitModel m) {
  return m == FitModel::LinearInK ? "linear" : "quadratic";
}

struct FitResult {
  FitModel model = FitModel::LinearInK;
  double c1 = 0.0;
  double c2 = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares for y = c1 * K^p + c2, p fixed by the model.
inline FitResult fit_scaling(const std::vector<std::pair<double, double>>& pts,
                             FitModel model) {
  if (pts.size() < 3)
    throw DegeneratePoints("need at least 3 points");
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (pts[i].first == pts[j].first)
        throw DegeneratePoints("K values must be distinct");

  const double p = model == FitModel::QuadraticInK ? 2.0 : 1.0;
  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [k, y] : pts) {
    const double x = std::pow(k, p);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  FitResult fit;
  fit.model = model;
  fit.c1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.c2 = (sy - fit.c1 * sx) / n;

  const double ybar = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (const auto& [k, y] : pts) {
    const double pred = fit.c1 * std::pow(k, p) + fit.c2;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - ybar) * (y - ybar);
  }
  if (ss_tot == 0.0)
    fit.r_squared = ss_res == 0.0 ? 1.0 : 0.0;
  else
    fit.r_squared = 1.0 - ss_res / ss_tot;
  return fit;
}

struct ExperimentConfig {
  std::string scale = "desk"; // "desk" or "paper"
  int n_trials = 20;
  std::uint64_t master_seed = 20200213;
  int jobs = 1;
  long long max_steps = 10'000'000;
  double delta = 0.1;
  std::optional<std::vector<int>> k_grid; // unset: defaults for the scale
};

namespace detail {

inline std::vector<int> resolve_k_grid(const ExperimentConfig& cfg,
                                       std::vector<int> desk_default,
                                       std::vector<int> paper_default) {
  if (cfg.k_grid) {
    if (cfg.k_grid->empty())
      throw BadGrid("empty K grid");
    return *cfg.k_grid;
  }
  return cfg.scale == "paper" ? paper_default : desk_default;
}

inline std::vector<int> range_grid(int lo, int hi, int step) {
  std::vector<int> g;
  for (int k = lo; k <= hi; k += step)
    g.push_back(k);
  return g;
}

} // namespace detail

/// Compares the seven within-arm ordering heuristics on one instance.
inline std::string experiment_ordering(const ExperimentConfig& cfg) {
  const int L = cfg.scale == "paper" ? 64 : 32;
  const int K = cfg.scale == "paper" ? 16 : 8;
  const Instance inst = make_linspace(0.9, 0.15, L, K, 0.0, cfg.delta);

  std::string csv = "ordering,L,K,n_trials,mean_steps,std_steps,n_capped\n";
  for (Ordering o : {Ordering::TCountAsc, Ordering::EmpAsc, Ordering::EmpDesc,
                     Ordering::UcbAsc, Ordering::UcbDesc, Ordering::LcbAsc,
                     Ordering::LcbDesc}) {
    AlgoSpec spec;
    spec.ordering = o;
    spec.max_steps = cfg.max_steps;
    const auto records =
        run_trials(inst, spec, cfg.n_trials, cfg.master_seed, cfg.jobs);
    const MeanStd ms = mean_steps(records);
    long long capped = 0;
    for (const auto& r : records)
      if (r.stop_reason == to_string(StopReason::StepCapHit))
        ++capped;
    csv += std::string(to_string(o)) + "," + std::to_string(L) + "," +
           std::to_string(K) + "," + std::to_string(cfg.n_trials) + "," +
           format_double(ms.mean) + "," + format_double(ms.stddev) + "," +
           std::to_string(capped) + "\n";
  }
  return csv;
}

/// CascadeBAI vs BatRac(1) and BatRac(K) on the two two-probability
/// families, sweeping K.
inline std::string experiment_semifeedback(const ExperimentConfig& cfg) {
  const int L = cfg.scale == "paper" ? 128 : 32;
  const auto grid = detail::resolve_k_grid(cfg, {8, 12, 16},
                                           detail::range_grid(20, 60, 10));
  struct Family {
    const char* name;
    double (*w_star)(int);
    double (*w_prime)(int);
  };
  const Family families[] = {
      {"small", [](int k) { return 1.0 / k; },
       [](int k) { return 1.0 / (static_cast<double>(k) * k); }},
      {"large", [](int k) { return 1.0 - 1.0 / (static_cast<double>(k) * k); },
       [](int k) { return 1.0 - 1.0 / k; }},
  };

  std::string csv = "family,algorithm,L,K,n_trials,mean_steps,std_steps\n";
  for (const auto& fam : families) {
    for (int K : grid) {
      const Instance inst =
          make_two_prob(fam.w_star(K), fam.w_prime(K), K, L, 0.0, cfg.delta);
      const AlgoSpec specs[] = {
          {"cascade", 1, Ordering::TCountAsc, cfg.max_steps,
           RadiusForm::MainText},
          {"batrac", 1, Ordering::TCountAsc, cfg.max_steps,
           RadiusForm::MainText},
          {"batrac", K, Ordering::TCountAsc, cfg.max_steps,
           RadiusForm::MainText},
      };
      for (const auto& spec : specs) {
        const auto records =
            run_trials(inst, spec, cfg.n_trials, cfg.master_seed, cfg.jobs);
        const MeanStd ms = mean_steps(records);
        const std::string algo_name =
            spec.algo == "batrac" ? "batrac(" + std::to_string(spec.b) + ")"
                                  : "cascade";
        csv += std::string(fam.name) + "," + algo_name + "," +
               std::to_string(L) + "," + std::to_string(K) + "," +
               std::to_string(cfg.n_trials) + "," + format_double(ms.mean) +
               "," + format_double(ms.stddev) + "\n";
      }
    }
  }
  return csv;
}

struct KscalingOutput {
  std::string csv;
  std::vector<std::pair<std::string, std::optional<FitResult>>> fits;
};

/// The five two-probability families, each fitted against its designated
/// polynomial model in K.
inline KscalingOutput experiment_kscaling(const ExperimentConfig& cfg) {
  const int L = cfg.scale == "paper" ? 128 : 64;
  const auto grid = detail::resolve_k_grid(cfg, {8, 12, 16, 20, 24},
                                           detail::range_grid(20, 60, 10));
  struct Family {
    const char* name;
    double (*w_star)(int);
    double (*w_prime)(int);
    FitModel model;
  };
  const Family families[] = {
      {"inv_k__inv_k2", [](int k) { return 1.0 / k; },
       [](int k) { return 1.0 / (static_cast<double>(k) * k); },
       FitModel::LinearInK},
      {"one_minus_inv_k2__one_minus_inv_k",
       [](int k) { return 1.0 - 1.0 / (static_cast<double>(k) * k); },
       [](int k) { return 1.0 - 1.0 / k; }, FitModel::QuadraticInK},
      {"inv_sqrt_k__inv_k", [](int k) { return 1.0 / std::sqrt(k); },
       [](int k) { return 1.0 / k; }, FitModel::LinearInK},
      {"one_minus_inv_k__one_minus_inv_sqrt_k",
       [](int k) { return 1.0 - 1.0 / k; },
       [](int k) { return 1.0 - 1.0 / std::sqrt(k); }, FitModel::LinearInK},
      {"one_minus_inv_k__inv_k", [](int k) { return 1.0 - 1.0 / k; },
       [](int k) { return 1.0 / k; }, FitModel::QuadraticInK},
  };

  KscalingOutput out;
  out.csv = "family,fit_model,L,K,n_trials,mean_steps,std_steps\n";
  for (const auto& fam : families) {
    std::vector<std::pair<double, double>> points;
    for (int K : grid) {
      const Instance inst =
          make_two_prob(fam.w_star(K), fam.w_prime(K), K, L, 0.0, cfg.delta);
      AlgoSpec spec;
      spec.max_steps = cfg.max_steps;
      const auto records =
          run_trials(inst, spec, cfg.n_trials, cfg.master_seed, cfg.jobs);
      const MeanStd ms = mean_steps(records);
      points.emplace_back(static_cast<double>(K), ms.mean);
      out.csv += std::string(fam.name) + "," + to_string(fam.model) + "," +
                 std::to_string(L) + "," + std::to_string(K) + "," +
                 std::to_string(cfg.n_trials) + "," + format_double(ms.mean) +
                 "," + format_double(ms.stddev) + "\n";
    }
    std::optional<FitResult> fit;
    if (points.size() >= 3)
      fit = fit_scaling(points, fam.model);
    out.fits.emplace_back(fam.name, fit);
  }
  return out;
}

} // namespace cascadebai
