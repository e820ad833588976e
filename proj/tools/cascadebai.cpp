#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascadebai/algo.hpp"
#include "cascadebai/bounds.hpp"
#include "cascadebai/harness.hpp"
#include "cascadebai/instance.hpp"

namespace cb = cascadebai;
using nlohmann::json;

namespace {

// Instance flags shared by run/trials/bounds. Exactly one of --weights,
// --two-prob, --linspace selects the weight vector.
struct InstanceFlags {
  std::vector<double> weights;
  std::vector<double> two_prob; // w*, w'
  std::vector<double> linspace; // w_max, w_min
  int L = 32;
  int K = 1;
  double delta = 0.1;
  double eps = 0.0;
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& f) {
  auto* w = cmd->add_option("--weights", f.weights,
                            "explicit weight list (one value per item)");
  auto* tp = cmd->add_option("--two-prob", f.two_prob,
                             "two-probability family: w* w'")
                 ->expected(2);
  auto* ls = cmd->add_option("--linspace", f.linspace,
                             "linearly spaced weights: w_max w_min")
                 ->expected(2);
  w->excludes(tp)->excludes(ls);
  tp->excludes(ls);
  cmd->add_option("--L", f.L, "number of items for --two-prob/--linspace");
  cmd->add_option("--K", f.K, "arm size")->required();
  cmd->add_option("--delta", f.delta, "risk level in (0,1)");
  cmd->add_option("--eps", f.eps, "tolerance (nonnegative)");
}

cb::Instance build_instance(const InstanceFlags& f) {
  if (!f.weights.empty()) {
    cb::Instance inst;
    inst.weights = f.weights;
    inst.K = f.K;
    inst.epsilon = f.eps;
    inst.delta = f.delta;
    return cb::validate(std::move(inst));
  }
  if (!f.two_prob.empty())
    return cb::make_two_prob(f.two_prob[0], f.two_prob[1], f.K, f.L, f.eps,
                             f.delta);
  if (!f.linspace.empty())
    return cb::make_linspace(f.linspace[0], f.linspace[1], f.L, f.K, f.eps,
                             f.delta);
  throw CLI::ValidationError(
      "one of --weights, --two-prob, --linspace is required");
}

struct AlgoFlags {
  std::string algo = "cascade";
  int b = 1;
  std::string order = "tcount";
  long long max_steps = 10'000'000;
  std::uint64_t seed = 0;
};

void add_algo_flags(CLI::App* cmd, AlgoFlags& f) {
  cmd->add_option("--algo", f.algo, "algorithm")
      ->check(CLI::IsMember({"cascade", "batrac"}));
  cmd->add_option("--b", f.b, "items per step for batrac");
  cmd->add_option("--order", f.order, "within-arm ordering")
      ->check(CLI::IsMember({"tcount", "emp-asc", "emp-desc", "ucb-asc",
                             "ucb-desc", "lcb-asc", "lcb-desc"}));
  cmd->add_option("--max-steps", f.max_steps, "step cap");
  cmd->add_option("--seed", f.seed, "seed (stream seed for run, master "
                                    "seed for trials/experiment)");
}

cb::AlgoSpec build_algo_spec(const AlgoFlags& f) {
  cb::AlgoSpec spec;
  spec.algo = f.algo;
  spec.b = f.b;
  spec.ordering = cb::ordering_from_string(f.order);
  spec.max_steps = f.max_steps;
  return spec;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw CLI::ValidationError("cannot open output file: " + path);
  out << text;
}

json bounds_report(const cb::Instance& inst) {
  const cb::GapProfile g = cb::gaps(inst);
  const cb::BoundReport r = cb::upper_bound_terms(inst, g);
  json j;
  j["L"] = inst.L();
  j["K"] = inst.K;
  j["delta"] = inst.delta;
  j["epsilon"] = inst.epsilon;
  j["k_prime"] = g.k_prime;
  j["deltas"] = g.deltas;
  j["bar_deltas"] = g.bar_deltas;
  j["sigma"] = g.sigma;
  j["thresholds"] = g.thresholds;
  j["regime"] =
      r.regime == cb::Regime::KPrimeGe2Km1 ? "k_prime_ge_2k_minus_1"
                                           : "k_prime_lt_2k_minus_1";
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  if (r.n3)
    j["n3"] = *r.n3;
  if (r.n3_expanded)
    j["n3_expanded"] = *r.n3_expanded;
  j["k1"] = r.k1;
  j["k2"] = r.k2;
  j["m"] = r.m;
  j["mu"] = r.mu;
  j["mu_tilde"] = r.mu_tilde;
  j["v"] = r.v;
  if (std::isfinite(r.lower_bound))
    j["lower_bound"] = r.lower_bound;
  return j;
}

std::vector<std::pair<double, double>> read_points(const std::string& path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file)
      throw CLI::ValidationError("cannot open input file: " + path);
    in = &file;
  }
  // Accepts "K,mean" (or whitespace-separated) rows; skips non-numeric
  // header lines and any trailing columns.
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(*in, line)) {
    for (char& c : line)
      if (c == ',')
        c = ' ';
    std::istringstream row(line);
    double k = 0, y = 0;
    if (row >> k >> y)
      pts.emplace_back(k, y);
  }
  return pts;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"CascadeBAI: best-arm identification under cascade feedback"};
  app.require_subcommand(1);
  // Structured-text config mirroring the flags, with one [subcommand]
  // section per subcommand; command-line flags override file values.
  app.set_config("--config", "", "config file mirroring the flags "
                                 "([run]/[trials]/... sections)");

  InstanceFlags inst_flags;
  AlgoFlags algo_flags;
  int n_trials = 20;
  int jobs = 1;
  std::string out_path;
  std::string exp_name = "ordering";
  std::string scale = "desk";
  std::vector<int> k_grid;
  std::string fit_model = "linear";
  std::string in_path;

  auto* run = app.add_subcommand("run", "one seeded run, summary to stdout");
  add_instance_flags(run, inst_flags);
  add_algo_flags(run, algo_flags);

  auto* trials = app.add_subcommand("trials", "seeded trial batch to CSV");
  add_instance_flags(trials, inst_flags);
  add_algo_flags(trials, algo_flags);
  trials->add_option("--n", n_trials, "number of trials");
  trials->add_option("--out", out_path, "output CSV path ('-' for stdout)");
  trials->add_option("--jobs", jobs, "worker threads");

  auto* bounds = app.add_subcommand("bounds", "analytic bound report (JSON)");
  add_instance_flags(bounds, inst_flags);
  bounds->add_option("--out", out_path, "output path ('-' for stdout)");

  auto* experiment = app.add_subcommand("experiment", "canned experiment");
  experiment->add_option("--name", exp_name, "experiment")
      ->check(CLI::IsMember({"ordering", "semifeedback", "kscaling"}));
  experiment->add_option("--scale", scale, "instance scale")
      ->check(CLI::IsMember({"desk", "paper"}));
  experiment->add_option("--n", n_trials, "trials per configuration");
  experiment->add_option("--jobs", jobs, "worker threads");
  experiment->add_option("--seed", algo_flags.seed, "master seed");
  experiment->add_option("--max-steps", algo_flags.max_steps, "step cap");
  experiment->add_option("--delta", inst_flags.delta, "risk level");
  experiment->add_option("--k-grid", k_grid, "override the K grid");
  experiment->add_option("--out", out_path, "output CSV path");

  auto* fit = app.add_subcommand("fit", "least-squares K-scaling fit");
  fit->add_option("--model", fit_model, "fit model")
      ->check(CLI::IsMember({"linear", "quadratic"}));
  fit->add_option("--in", in_path, "points CSV: K,mean_steps per row");
  fit->add_option("--out", out_path, "output path ('-' for stdout)");

  // --config may appear before or after the subcommand; fallthrough lets
  // the root app claim it either way.
  for (CLI::App* sub : app.get_subcommands(nullptr))
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const cb::Instance inst = build_instance(inst_flags);
      const cb::AlgoSpec spec = build_algo_spec(algo_flags);
      const cb::RunResult res = cb::run_one(inst, spec, algo_flags.seed);
      json j;
      j["algorithm"] = spec.algo == "batrac"
                           ? "batrac(" + std::to_string(spec.b) + ")"
                           : "cascade";
      j["ordering"] = cb::to_string(spec.ordering);
      j["seed"] = algo_flags.seed;
      j["steps"] = res.steps;
      j["success"] = res.success;
      j["total_observations"] = res.total_observations;
      j["stop_reason"] = cb::to_string(res.stop_reason);
      std::vector<int> rec;
      for (int i : res.recommended)
        rec.push_back(inst.original_index[i]);
      j["recommended_items"] = rec; // positions in the user-supplied order
      std::cout << j.dump(2) << "\n";
    } else if (trials->parsed()) {
      const cb::Instance inst = build_instance(inst_flags);
      const cb::AlgoSpec spec = build_algo_spec(algo_flags);
      const auto records =
          cb::run_trials(inst, spec, n_trials, algo_flags.seed, jobs);
      write_text(out_path, cb::to_csv(records));
    } else if (bounds->parsed()) {
      const cb::Instance inst = build_instance(inst_flags);
      write_text(out_path, bounds_report(inst).dump(2) + "\n");
    } else if (experiment->parsed()) {
      cb::ExperimentConfig cfg;
      cfg.scale = scale;
      cfg.n_trials = n_trials;
      cfg.master_seed = algo_flags.seed ? algo_flags.seed : cfg.master_seed;
      cfg.jobs = jobs;
      cfg.max_steps = algo_flags.max_steps;
      cfg.delta = inst_flags.delta;
      if (experiment->count("--k-grid"))
        cfg.k_grid = k_grid;
      if (exp_name == "ordering") {
        write_text(out_path, cb::experiment_ordering(cfg));
      } else if (exp_name == "semifeedback") {
        write_text(out_path, cb::experiment_semifeedback(cfg));
      } else {
        const cb::KscalingOutput out = cb::experiment_kscaling(cfg);
        write_text(out_path, out.csv);
        for (const auto& [family, f] : out.fits) {
          if (!f)
            continue;
          std::fprintf(stderr, "fit %s: model=%s c1=%.6g c2=%.6g R2=%.6f\n",
                       family.c_str(), cb::to_string(f->model), f->c1, f->c2,
                       f->r_squared);
        }
      }
    } else if (fit->parsed()) {
      const auto pts = read_points(in_path);
      const cb::FitModel model = fit_model == "quadratic"
                                     ? cb::FitModel::QuadraticInK
                                     : cb::FitModel::LinearInK;
      const cb::FitResult f = cb::fit_scaling(pts, model);
      json j;
      j["model"] = cb::to_string(f.model);
      j["c1"] = f.c1;
      j["c2"] = f.c2;
      j["r_squared"] = f.r_squared;
      j["n_points"] = pts.size();
      write_text(out_path, j.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
