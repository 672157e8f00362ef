#include "everest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "everest/errors.hpp"
#include "everest/io.hpp"
#include "everest/truncation.hpp"

namespace everest {

namespace {

using nlohmann::json;

std::string av_name(AvKind k) {
  switch (k) {
    case AvKind::none: return "none";
    case AvKind::second: return "second";
    case AvKind::fourth: return "fourth";
  }
  throw ConfigError("unknown artificial-viscosity kind");
}

AvKind av_from_name(const std::string& s) {
  if (s == "none") return AvKind::none;
  if (s == "second") return AvKind::second;
  if (s == "fourth") return AvKind::fourth;
  throw ConfigError("unknown artificial-viscosity kind: " + s);
}

std::string limiter_name(Limiter l) {
  return l == Limiter::minmod ? "minmod" : "vanleer";
}

Limiter limiter_from_name(const std::string& s) {
  if (s == "minmod") return Limiter::minmod;
  if (s == "vanleer") return Limiter::vanleer;
  throw ConfigError("unknown limiter: " + s);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
    }
  }
}

json scheme_to_json(const SchemeConfig& s) {
  return json{{"name", scheme_name(s.scheme_id)},
              {"nominal_order", s.nominal_order},
              {"av", av_name(s.av_kind)},
              {"av_mu", s.av_mu},
              {"limiter", limiter_name(s.limiter)},
              {"cfl", s.cfl},
              {"conv_tol", s.conv_tol},
              {"max_iters", s.max_iters}};
}

SchemeConfig scheme_from_json(const json& j) {
  check_keys(j,
             {"name", "nominal_order", "av", "av_mu", "limiter", "cfl",
              "conv_tol", "max_iters"},
             "scheme");
  if (!j.contains("name")) throw ConfigError("scheme: missing \"name\"");
  SchemeConfig s = default_scheme(scheme_from_name(j.at("name")));
  if (j.contains("nominal_order")) s.nominal_order = j.at("nominal_order");
  if (j.contains("av")) s.av_kind = av_from_name(j.at("av"));
  if (j.contains("av_mu")) s.av_mu = j.at("av_mu");
  if (j.contains("limiter")) s.limiter = limiter_from_name(j.at("limiter"));
  if (j.contains("cfl")) s.cfl = j.at("cfl");
  if (j.contains("conv_tol")) s.conv_tol = j.at("conv_tol");
  if (j.contains("max_iters")) s.max_iters = j.at("max_iters");
  return s;
}

std::vector<std::string> member_ids(const std::vector<SchemeConfig>& schemes) {
  std::map<std::string, int> seen;
  std::vector<std::string> ids;
  ids.reserve(schemes.size());
  for (const auto& s : schemes) {
    const std::string name = scheme_name(s.scheme_id);
    const int k = ++seen[name];
    ids.push_back(k == 1 ? name : name + "-" + std::to_string(k));
  }
  return ids;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& ids,
                      const SquareMatrix& m) {
  std::vector<std::string> header{"scheme"};
  header.insert(header.end(), ids.begin(), ids.end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> row{ids[i]};
    for (std::size_t j = 0; j < ids.size(); ++j) {
      row.push_back(format_double(m[i][j]));
    }
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

json range_of(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return json{{"min", *lo}, {"max", *hi}};
}

struct PipelineData {
  std::vector<std::string> ok_ids;
  std::vector<GridVector> solutions;
  std::vector<GridVector> errors;
  std::vector<GridVector> truncations;
};

}  // namespace

std::string case_name(CaseKind kind) {
  switch (kind) {
    case CaseKind::oblique: return "oblique";
    case CaseKind::edney1: return "edney1";
    case CaseKind::edney6: return "edney6";
  }
  throw ConfigError("unknown case kind");
}

CaseKind case_from_name(const std::string& name) {
  if (name == "oblique") return CaseKind::oblique;
  if (name == "edney1") return CaseKind::edney1;
  if (name == "edney6") return CaseKind::edney6;
  throw ConfigError("unknown case: " + name +
                    " (expected oblique, edney1 or edney6)");
}

GridSpec ExperimentConfig::grid() const {
  return GridSpec{.nx = nx, .ny = ny, .x0 = x0, .y0 = y0, .lx = lx, .ly = ly};
}

std::vector<int> ExperimentConfig::error_variables() const {
  return density_only ? std::vector<int>{0} : all_variables();
}

void ExperimentConfig::validate_case() const {
  if (!(mach > 1.0)) throw ConfigError("config: mach must exceed 1");
  if (!(gamma > 1.0)) throw ConfigError("config: gamma must exceed 1");
  if (!(lx > 0.0) || !(ly > 0.0)) {
    throw ConfigError("config: domain extents must be positive");
  }
  if (mask_margin < 3) {
    throw ConfigError(
        "config: mask margin below the sixth-order stencil half-width (3)");
  }
  if (nx < 2 * mask_margin + 3 || ny < 2 * mask_margin + 3) {
    throw ConfigError("config: grid too small for the mask margin");
  }
}

void ExperimentConfig::validate() const {
  validate_case();
  if (schemes.empty()) throw ConfigError("config: scheme list is empty");
  for (const auto& s : schemes) s.validate();
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    check_keys(j,
               {"case", "mach", "angle_lower_deg", "angle_upper_deg", "gamma",
                "grid", "schemes", "error_variables", "mask_margin", "out_dir",
                "seed"},
               "config");
    if (j.contains("case")) c.case_kind = case_from_name(j.at("case"));
    if (j.contains("mach")) c.mach = j.at("mach");
    if (j.contains("angle_lower_deg")) c.angle_lower_deg = j.at("angle_lower_deg");
    if (j.contains("angle_upper_deg")) c.angle_upper_deg = j.at("angle_upper_deg");
    if (j.contains("gamma")) c.gamma = j.at("gamma");
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      check_keys(g, {"nx", "ny", "lx", "ly", "x0", "y0"}, "grid");
      c.nx = g.value("nx", c.nx);
      c.ny = g.value("ny", c.ny);
      c.lx = g.value("lx", c.lx);
      c.ly = g.value("ly", c.ly);
      c.x0 = g.value("x0", c.x0);
      c.y0 = g.value("y0", c.y0);
    }
    if (j.contains("schemes")) {
      if (!j.at("schemes").is_array()) {
        throw ConfigError("config: \"schemes\" must be an array");
      }
      c.schemes.clear();
      for (const json& s : j.at("schemes")) c.schemes.push_back(scheme_from_json(s));
    }
    if (j.contains("error_variables")) {
      const std::string v = j.at("error_variables");
      if (v == "all") {
        c.density_only = false;
      } else if (v == "density") {
        c.density_only = true;
      } else {
        throw ConfigError("config: error_variables must be all or density");
      }
    }
    if (j.contains("mask_margin")) c.mask_margin = j.at("mask_margin");
    if (j.contains("out_dir")) {
      c.out_dir = std::filesystem::path(j.at("out_dir").get<std::string>());
    }
    if (j.contains("seed")) c.seed = j.at("seed");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate_case();
  for (const auto& s : c.schemes) s.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json schemes = json::array();
  for (const auto& s : c.schemes) schemes.push_back(scheme_to_json(s));
  return json{{"case", case_name(c.case_kind)},
              {"mach", c.mach},
              {"angle_lower_deg", c.angle_lower_deg},
              {"angle_upper_deg", c.angle_upper_deg},
              {"gamma", c.gamma},
              {"grid",
               {{"nx", c.nx},
                {"ny", c.ny},
                {"lx", c.lx},
                {"ly", c.ly},
                {"x0", c.x0},
                {"y0", c.y0}}},
              {"schemes", schemes},
              {"error_variables", c.density_only ? "density" : "all"},
              {"mask_margin", c.mask_margin},
              {"out_dir", c.out_dir.generic_string()},
              {"seed", c.seed}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " +
                      e.what());
  }
  return config_from_json(j);
}

AnalyticField build_case(const ExperimentConfig& c) {
  switch (c.case_kind) {
    case CaseKind::oblique:
      return build_oblique_case(c.mach, c.angle_lower_deg, c.grid(), c.gamma);
    case CaseKind::edney1:
      return build_edney1(c.mach, c.angle_lower_deg, c.angle_upper_deg,
                          c.grid(), c.gamma);
    case CaseKind::edney6:
      return build_edney6(c.mach, c.angle_lower_deg, c.angle_upper_deg,
                          c.grid(), c.gamma);
  }
  throw ConfigError("unknown case kind");
}

json summarize_estimators(const json& est) {
  const json& pairs = est.at("pairs");
  const json& solutions = est.at("solutions");
  double alpha_sum = 0.0, beta_sum = 0.0;
  double alpha_min = 0.0, alpha_max = 0.0, beta_min = 0.0, beta_max = 0.0;
  long ok_beta3 = 0;
  std::vector<double> eff_beta3, eff_direct, eff_two;
  bool first = true;
  for (const json& p : pairs) {
    const double a = p.at("alpha_deg");
    const double b = p.at("beta_deg");
    alpha_sum += a;
    beta_sum += b;
    if (first || a < alpha_min) alpha_min = a;
    if (first || a > alpha_max) alpha_max = a;
    if (first || b < beta_min) beta_min = b;
    if (first || b > beta_max) beta_max = b;
    first = false;
    if (a >= b / 3.0) ok_beta3++;
    eff_beta3.push_back(p.at("eff_beta3"));
    eff_direct.push_back(p.at("eff_direct"));
    eff_two.push_back(p.at("eff_pair_k"));
    eff_two.push_back(p.at("eff_pair_m"));
  }
  std::vector<double> eff_dk, eff_width, eff_angle;
  for (const json& s : solutions) {
    eff_dk.push_back(s.at("eff_dk_max"));
    eff_width.push_back(s.at("eff_width"));
    eff_angle.push_back(s.at("eff_angle_beta3"));
  }
  const double n = pairs.empty() ? 1.0 : double(pairs.size());
  json angles{{"alpha_mean_deg", alpha_sum / n},
              {"alpha_min_deg", alpha_min},
              {"alpha_max_deg", alpha_max},
              {"beta_mean_deg", beta_sum / n},
              {"beta_min_deg", beta_min},
              {"beta_max_deg", beta_max},
              {"pairs", pairs.size()},
              {"alpha_beta3_fraction",
               pairs.empty() ? 0.0 : double(ok_beta3) / double(pairs.size())}};
  json eff{{"dk_max", range_of(eff_dk)},
           {"width", range_of(eff_width)},
           {"angle_beta3_solution", range_of(eff_angle)},
           {"angle_beta3_pair", range_of(eff_beta3)},
           {"angle_direct_pair", range_of(eff_direct)},
           {"two_solution", range_of(eff_two)}};
  return json{{"angles", angles}, {"effectivity", eff}};
}

namespace {

json estimators_to_json(const EnsembleReport& rep) {
  json solutions = json::array();
  for (const auto& s : rep.estimates) {
    solutions.push_back(json{{"id", s.id},
                             {"true_norm", s.true_norm},
                             {"truncation_norm", s.truncation_norm},
                             {"dk_max_bound", s.dk_max_bound},
                             {"eff_dk_max", s.eff_dk_max},
                             {"eff_width", s.eff_width},
                             {"angle_bound_beta3", s.angle_bound_beta3},
                             {"eff_angle_beta3", s.eff_angle_beta3}});
  }
  json pairs = json::array();
  for (const auto& p : rep.pairs) {
    pairs.push_back(json{{"k", p.k},
                         {"m", p.m},
                         {"id_k", rep.ids[p.k]},
                         {"id_m", rep.ids[p.m]},
                         {"distance", p.distance},
                         {"alpha_deg", p.alpha_deg},
                         {"beta_deg", p.beta_deg},
                         {"bound_beta3", p.bound_beta3},
                         {"eff_beta3", p.eff_beta3},
                         {"bound_direct", p.bound_direct},
                         {"eff_direct", p.eff_direct},
                         {"eff_pair_k", p.eff_pair_k},
                         {"eff_pair_m", p.eff_pair_m}});
  }
  json summary_block = [&](const AngleSummary& a) {
    return json{
        {"mean", a.mean}, {"min", a.min}, {"max", a.max}, {"pairs", a.pairs}};
  }(rep.alpha_summary);
  return json{{"solutions", solutions},
              {"pairs", pairs},
              {"width", rep.width},
              {"alpha_summary", summary_block},
              {"beta_summary",
               {{"mean", rep.beta_summary.mean},
                {"min", rep.beta_summary.min},
                {"max", rep.beta_summary.max},
                {"pairs", rep.beta_summary.pairs}}},
              {"alpha_beta3_fraction", rep.alpha_beta3_fraction}};
}

ExperimentOutcome run_pipeline(const ExperimentConfig& config, int jobs,
                               bool analyze) {
  config.validate();
  if (analyze && config.schemes.size() < 2) {
    throw ConfigError("ensemble analysis needs at least 2 schemes");
  }

  ExperimentOutcome out;
  out.config = config;
  const GridSpec grid = config.grid();
  const AnalyticField reference = build_case(config);
  const ConservedField exact = project_to_grid(reference, grid);

  const std::size_t n = config.schemes.size();
  const std::vector<std::string> ids = member_ids(config.schemes);
  out.members.resize(n);
  std::vector<std::optional<SolveResult>> solves(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      MemberResult& m = out.members[i];
      m.id = ids[i];
      m.scheme = config.schemes[i];
      try {
        SolveResult r = solve_steady(config.schemes[i], reference, grid);
        m.converged = r.converged;
        m.iters = r.iters;
        if (r.residual_history.size() > 1 && r.residual_history.front() > 0) {
          m.residual_drop =
              r.residual_history.back() / r.residual_history.front();
        }
        solves[i] = std::move(r);
      } catch (const std::exception& e) {
        m.failed = true;
        m.failure = e.what();
      }
    }
  };
  const int workers =
      std::clamp(jobs, 1, static_cast<int>(std::min<std::size_t>(n, 16)));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::filesystem::create_directories(config.out_dir);
  for (std::size_t i = 0; i < n; ++i) {
    const MemberResult& m = out.members[i];
    if (m.failed) {
      out.warnings.push_back("scheme " + m.id + " failed and is excluded: " +
                             m.failure);
      continue;
    }
    if (!m.converged) {
      out.warnings.push_back(
          "scheme " + m.id + " stopped at relative residual " +
          format_double(m.residual_drop) + " after " +
          std::to_string(m.iters) + " iterations without reaching tolerance");
    }
    const ConservedField& f = solves[i]->field;
    write_vtk_field(config.out_dir / (m.id + "_field.vtk"), m.id, f);
    write_raw_field(config.out_dir / (m.id + "_field.raw"), f);
  }

  if (analyze) {
    const std::vector<int> vars = config.error_variables();
    const auto norm = freestream_normalization();
    const ConservedField zero(grid, config.gamma);
    PipelineData data;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.members[i].failed) continue;
      const ConservedField& f = solves[i]->field;
      data.ok_ids.push_back(out.members[i].id);
      data.solutions.push_back(
          error_vector(f, zero, config.mask_margin, vars, norm));
      data.errors.push_back(
          error_vector(f, exact, config.mask_margin, vars, norm));
      data.truncations.push_back(
          high_order_residual(f, config.mask_margin, vars, norm));
      write_vtk_gridvector(config.out_dir / (out.members[i].id + "_error.vtk"),
                           out.members[i].id + " error", data.errors.back());
      write_vtk_gridvector(
          config.out_dir / (out.members[i].id + "_truncation.vtk"),
          out.members[i].id + " truncation", data.truncations.back());
    }

    // Bitwise-identical members produce zero distances, undefined angles and
    // unusable angle bounds; flag them and analyze distinct members only.
    double scale = 1.0;
    for (const auto& s : data.solutions) scale = std::max(scale, l2_norm(s));
    const double tol = 1e-12 * scale;
    std::vector<char> dup(data.ok_ids.size(), 0);
    for (std::size_t i = 0; i < data.ok_ids.size(); ++i) {
      if (dup[i]) continue;
      for (std::size_t j = i + 1; j < data.ok_ids.size(); ++j) {
        if (dup[j]) continue;
        const double d = l2_distance(data.solutions[i], data.solutions[j]);
        if (d <= tol) {
          out.degenerate_pairs.push_back({data.ok_ids[i], data.ok_ids[j], d});
          out.warnings.push_back("schemes " + data.ok_ids[i] + " and " +
                                 data.ok_ids[j] +
                                 " coincide (zero distance): pair angles are "
                                 "undefined, duplicate excluded from analysis");
          dup[j] = 1;
        }
      }
    }
    PipelineData kept;
    for (std::size_t i = 0; i < data.ok_ids.size(); ++i) {
      if (dup[i]) continue;
      kept.ok_ids.push_back(data.ok_ids[i]);
      kept.solutions.push_back(std::move(data.solutions[i]));
      kept.errors.push_back(std::move(data.errors[i]));
      kept.truncations.push_back(std::move(data.truncations[i]));
    }
    out.analyzed_ids = kept.ok_ids;

    if (kept.ok_ids.size() >= 2) {
      try {
        out.report = analyze_ensemble(kept.ok_ids, kept.solutions, kept.errors,
                                      kept.truncations);
      } catch (const Error& e) {
        out.warnings.push_back(std::string("ensemble analysis failed: ") +
                               e.what());
      }
    } else {
      out.warnings.push_back(
          "ensemble analysis skipped: fewer than 2 distinct members");
    }
  }

  json degenerate = json::array();
  for (const auto& d : out.degenerate_pairs) {
    degenerate.push_back(
        json{{"a", d.id_a}, {"b", d.id_b}, {"distance", d.distance}});
  }
  json members = json::array();
  for (const auto& m : out.members) {
    members.push_back(json{{"id", m.id},
                           {"scheme", scheme_to_json(m.scheme)},
                           {"failed", m.failed},
                           {"failure", m.failure},
                           {"converged", m.converged},
                           {"iters", m.iters},
                           {"residual_drop", m.residual_drop}});
  }
  json case_block = analytic_summary(reference);
  case_block["region_count"] = reference.sectors().size();

  json summary{{"mode", analyze ? "analyze" : "solve"},
               {"config", config_to_json(config)},
               {"case", case_block},
               {"members", members},
               {"analyzed", out.analyzed_ids},
               {"degenerate_pairs", degenerate},
               {"warnings", out.warnings},
               {"angles", nullptr},
               {"effectivity", nullptr}};

  if (out.report) {
    const EnsembleReport& rep = *out.report;
    write_matrix_csv(config.out_dir / "angles_alpha.csv", rep.ids, rep.alpha);
    write_matrix_csv(config.out_dir / "angles_beta.csv", rep.ids, rep.beta);
    write_matrix_csv(config.out_dir / "distances.csv", rep.ids, rep.distances);
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : rep.pairs) {
      rows.push_back({std::to_string(p.k), std::to_string(p.m), rep.ids[p.k],
                      rep.ids[p.m], format_double(p.beta_deg),
                      format_double(p.alpha_deg)});
    }
    write_csv(config.out_dir / "angle_scatter.csv",
              {"k", "m", "scheme_k", "scheme_m", "beta_deg", "alpha_deg"},
              rows);
    const json est = estimators_to_json(rep);
    write_json_file(config.out_dir / "estimators.json", est);
    const json derived = summarize_estimators(est);
    summary["angles"] = derived.at("angles");
    summary["effectivity"] = derived.at("effectivity");
  }

  out.summary = summary;
  write_json_file(config.out_dir / "summary.json", summary);
  return out;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, int jobs) {
  return run_pipeline(config, jobs, true);
}

ExperimentOutcome run_solve(const ExperimentConfig& config, int jobs) {
  return run_pipeline(config, jobs, false);
}

json validate_only(const ExperimentConfig& config) {
  config.validate_case();
  const AnalyticField reference = build_case(config);
  json case_block = analytic_summary(reference);
  case_block["region_count"] = reference.sectors().size();
  return json{{"config", config_to_json(config)}, {"case", case_block}};
}

}  // namespace everest
