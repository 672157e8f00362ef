#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "everest/analytic.hpp"
#include "everest/estimators.hpp"
#include "everest/solver.hpp"

namespace everest {

enum class CaseKind { oblique, edney1, edney6 };

std::string case_name(CaseKind kind);
CaseKind case_from_name(const std::string& name);  // throws ConfigError

/// One experiment: an analytic reference case, a grid, and the scheme
/// ensemble to run on it. Every field has a default; a config file only
/// names what it overrides, and the full effective tree is echoed into
/// summary.json.
struct ExperimentConfig {
  CaseKind case_kind = CaseKind::edney1;
  double mach = 4.0;
  double angle_lower_deg = 20.0;  // oblique: the single deflection angle
  double angle_upper_deg = 15.0;  // edney6: second ramp (absolute) angle
  double gamma = 1.4;
  int nx = 100;
  int ny = 100;
  double lx = 1.0;
  double ly = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<SchemeConfig> schemes;
  bool density_only = false;  // error_variables: "density" vs "all"
  int mask_margin = 3;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 2024;  // mc-orthogonality subcommand only

  GridSpec grid() const;
  std::vector<int> error_variables() const;
  void validate_case() const;  // case/grid parameters only
  void validate() const;       // validate_case plus the scheme list
};

/// Parses the flat JSON schema (unknown keys are errors) and applies
/// per-scheme roster defaults before overrides.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Dispatch to the analytic case builders.
AnalyticField build_case(const ExperimentConfig& config);

struct MemberResult {
  std::string id;  // scheme name, "-2"/"-3" suffixed for repeats
  SchemeConfig scheme;
  bool failed = false;
  std::string failure;  // exception text when failed
  bool converged = false;
  long iters = 0;
  double residual_drop = 0.0;  // last/first density residual
};

struct DegeneratePair {
  std::string id_a;
  std::string id_b;
  double distance = 0.0;
};

struct ExperimentOutcome {
  ExperimentConfig config;
  std::vector<MemberResult> members;      // config order, failures included
  std::vector<std::string> analyzed_ids;  // members that reach the analysis
  std::vector<DegeneratePair> degenerate_pairs;
  std::vector<std::string> warnings;
  std::optional<EnsembleReport> report;  // absent below 2 distinct members
  nlohmann::json summary;                // contents of summary.json
};

/// Full pipeline: build the reference, relax every scheme (jobs worker
/// threads), form approximation-error and truncation vectors, run the
/// distance/angle/estimator analysis and write all artifacts into
/// config.out_dir. Failing members are excluded from the analysis with a
/// warning; duplicate (zero-distance) members are flagged as degenerate
/// pairs, their angles left undefined.
ExperimentOutcome run_experiment(const ExperimentConfig& config, int jobs = 1);

/// Solve-only variant: per-scheme fields and summary.json, no ensemble
/// analysis.
ExperimentOutcome run_solve(const ExperimentConfig& config, int jobs = 1);

/// Analytic reference check without solves: region table, wave angles and
/// matching residuals, as written to analytic.json by the CLI.
nlohmann::json validate_only(const ExperimentConfig& config);

/// Recomputes the angle means and effectivity ranges of summary.json from
/// estimators.json content; run_experiment embeds exactly this object, so
/// reports stay recomputable from the published estimator tables.
nlohmann::json summarize_estimators(const nlohmann::json& estimators);

}  // namespace everest
