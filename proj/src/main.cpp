#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "everest/concentration.hpp"
#include "everest/errors.hpp"
#include "everest/harness.hpp"
#include "everest/io.hpp"

namespace {

using everest::ExperimentConfig;
using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool need_config = true) {
  auto* c = cmd->add_option("--config", opts.config_path,
                            "experiment config file (JSON)");
  if (need_config) c->required();
  cmd->add_option("--out", opts.out_dir,
                  "output directory (overrides the config)");
  cmd->add_option("--jobs", opts.jobs, "solver worker threads")
      ->check(CLI::Range(1, 64));
}

ExperimentConfig load(const CommonOpts& opts) {
  ExperimentConfig cfg = everest::load_config(opts.config_path);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  return cfg;
}

void print_outcome(const everest::ExperimentOutcome& out) {
  for (const auto& m : out.members) {
    if (m.failed) {
      std::printf("  %-16s FAILED: %s\n", m.id.c_str(), m.failure.c_str());
    } else {
      std::printf("  %-16s %6ld iters  residual drop %.3e%s\n", m.id.c_str(),
                  m.iters, m.residual_drop, m.converged ? "" : "  (stalled)");
    }
  }
  for (const auto& w : out.warnings) {
    std::printf("warning: %s\n", w.c_str());
  }
  if (out.report) {
    const auto& rep = *out.report;
    std::printf("ensemble: %zu members, width %.6g\n", rep.ids.size(),
                rep.width);
    std::printf("angles: mean alpha %.2f deg, mean beta %.2f deg over %d "
                "pairs\n",
                rep.alpha_summary.mean, rep.beta_summary.mean,
                rep.alpha_summary.pairs);
  }
  std::printf("artifacts: %s\n", out.config.out_dir.generic_string().c_str());
}

int cmd_solve(const CommonOpts& opts) {
  const auto out = everest::run_solve(load(opts), opts.jobs);
  print_outcome(out);
  return 0;
}

int cmd_analyze(const CommonOpts& opts) {
  const auto out = everest::run_experiment(load(opts), opts.jobs);
  print_outcome(out);
  return 0;
}

int cmd_report(const CommonOpts& opts) {
  std::filesystem::path dir = opts.out_dir;
  if (dir.empty()) {
    if (opts.config_path.empty()) {
      throw everest::ConfigError("report: pass --out or --config");
    }
    dir = everest::load_config(opts.config_path).out_dir;
  }
  std::ifstream in(dir / "estimators.json", std::ios::binary);
  if (!in) {
    throw everest::ConfigError("report: no estimators.json under " +
                               dir.generic_string());
  }
  json est;
  in >> est;
  std::cout << everest::summarize_estimators(est).dump(2) << "\n";
  return 0;
}

int cmd_validate(const CommonOpts& opts) {
  const ExperimentConfig cfg = load(opts);
  const json j = everest::validate_only(cfg);
  std::cout << j.dump(2) << "\n";
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(cfg.out_dir / "analytic.json", std::ios::binary);
  out << j.dump(2) << "\n";
  return 0;
}

struct McOpts {
  std::vector<int> dims{100, 1000, 10000};
  std::vector<double> deltas{0.01, 0.05, 0.1};
  long samples = 100000;
  std::uint64_t seed = 2024;
  bool pairs = false;
  std::string out_path;
  std::string config_path;
};

int cmd_mc(const McOpts& opts) {
  std::uint64_t seed = opts.seed;
  if (!opts.config_path.empty()) {
    seed = everest::load_config(opts.config_path).seed;
  }
  std::vector<std::string> header{"dim", "delta", "samples", "empirical",
                                  "bound"};
  std::vector<std::vector<std::string>> rows;
  for (int dim : opts.dims) {
    for (double delta : opts.deltas) {
      const auto r = everest::mc_orthogonality(
          dim, opts.samples, delta, seed,
          opts.pairs ? everest::McMethod::pairs : everest::McMethod::radial);
      rows.push_back({std::to_string(dim), everest::format_double(delta),
                      std::to_string(r.samples),
                      everest::format_double(r.empirical),
                      everest::format_double(r.bound)});
      std::printf("N=%-6d delta=%-5g empirical %.3e  bound %.3e\n", dim, delta,
                  r.empirical, r.bound);
    }
  }
  if (!opts.out_path.empty()) {
    std::filesystem::path p(opts.out_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    everest::write_csv(p, header, rows);
    std::printf("wrote %s\n", p.generic_string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shock-interaction verification workbench"};
  app.require_subcommand(1);

  CommonOpts solve_opts, analyze_opts, report_opts, validate_opts;
  McOpts mc_opts;

  add_common(app.add_subcommand("solve", "run the scheme ensemble, write fields"),
             solve_opts);
  add_common(app.add_subcommand(
                 "analyze", "full pipeline: solve, errors, angles, estimators"),
             analyze_opts);
  auto* report = app.add_subcommand(
      "report", "recompute the summary blocks from estimators.json");
  add_common(report, report_opts, false);
  add_common(app.add_subcommand("validate",
                                "build and check the analytic reference only"),
             validate_opts);

  auto* mc = app.add_subcommand("mc-orthogonality",
                                "Monte Carlo check of the concentration bound");
  mc->add_option("--config", mc_opts.config_path, "config file (seed source)");
  mc->add_option("--dim", mc_opts.dims, "space dimensions to sample");
  mc->add_option("--delta", mc_opts.deltas, "cosine thresholds");
  mc->add_option("--samples", mc_opts.samples, "sample pairs per point")
      ->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_opts.seed, "generator seed");
  mc->add_flag("--pairs", mc_opts.pairs,
               "sample literal vector pairs instead of the radial marginal");
  mc->add_option("--out", mc_opts.out_path, "CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("solve")) return cmd_solve(solve_opts);
    if (app.got_subcommand("analyze")) return cmd_analyze(analyze_opts);
    if (app.got_subcommand("report")) return cmd_report(report_opts);
    if (app.got_subcommand("validate")) return cmd_validate(validate_opts);
    if (app.got_subcommand("mc-orthogonality")) return cmd_mc(mc_opts);
  } catch (const everest::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
