#include "everest/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace everest {

namespace {

constexpr double kPi = std::numbers::pi;
double rad2deg(double r) { return r * 180.0 / kPi; }

double mach_angle_deg(double mach) { return rad2deg(std::asin(1.0 / mach)); }

// Rankine-Hugoniot recheck for a wave produced by turn_to_direction.
double wave_rh_residual(const FlowState& upstream, const WaveTurn& w) {
  if (w.kind != WaveKind::shock) return 0.0;
  const auto sol = oblique_shock_downstream(upstream, w.shock_angle_deg);
  return rankine_hugoniot_residual(sol);
}

}  // namespace

FlowState ExpansionFan::state_at_ray(double ray_angle_deg) const {
  const double sign = turn_deg >= 0.0 ? 1.0 : -1.0;
  const double theta0 = upstream.direction_deg();
  const double nu0 = prandtl_meyer_nu_deg(upstream.mach(), upstream.gamma);
  const double m_end =
      prandtl_meyer_mach(nu0 + std::abs(turn_deg), upstream.gamma);
  // Characteristic angle carrying Mach m.
  auto phi = [&](double m) {
    const double theta =
        theta0 + sign * (prandtl_meyer_nu_deg(m, upstream.gamma) - nu0);
    return theta - sign * mach_angle_deg(m);
  };
  const double target =
      std::clamp(ray_angle_deg, ray_lo_deg, ray_hi_deg);
  double lo = upstream.mach(), hi = m_end;
  double f_lo = phi(lo) - target, f_hi = phi(hi) - target;
  double m;
  if (f_lo == 0.0 || (f_lo < 0.0) == (f_hi < 0.0)) {
    m = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
  } else {
    m = detail::solve_bracketed([&](double x) { return phi(x) - target; }, lo,
                                hi, f_lo, f_hi);
  }
  const double nu_turn = prandtl_meyer_nu_deg(m, upstream.gamma) - nu0;
  return prandtl_meyer_turn(upstream, sign * nu_turn);
}

AnalyticField AnalyticField::uniform(const FlowState& s,
                                     const std::string& label) {
  AnalyticField f(0.0, 0.0, {}, {Sector{s, std::nullopt, 0, label}});
  return f;
}

AnalyticField::AnalyticField(double anchor_x, double anchor_y,
                             std::vector<Ray> rays, std::vector<Sector> sectors)
    : ax_(anchor_x), ay_(anchor_y), rays_(std::move(rays)),
      sectors_(std::move(sectors)) {
  if (!rays_.empty() && rays_.size() != sectors_.size()) {
    throw InvalidParams("AnalyticField: rays/sectors size mismatch");
  }
  for (size_t k = 1; k < rays_.size(); ++k) {
    if (!(rays_[k - 1].angle_deg < rays_[k].angle_deg)) {
      throw InvalidParams("AnalyticField: ray angles must be ascending");
    }
  }
}

const AnalyticField::Sector& AnalyticField::sector_at(double x,
                                                      double y) const {
  if (rays_.empty()) return sectors_.front();
  const double a = rad2deg(std::atan2(y - ay_, x - ax_));
  const int n = static_cast<int>(rays_.size());
  // Last ray with angle <= a; wrap sector when a precedes the first ray.
  int k = -1;
  for (int i = 0; i < n; ++i) {
    if (rays_[i].angle_deg <= a) k = i;
  }
  if (k < 0) return sectors_[n - 1];
  if (rays_[k].angle_deg == a && !rays_[k].tie_ccw) {
    return sectors_[(k + n - 1) % n];
  }
  return sectors_[k];
}

FlowState AnalyticField::evaluate(double x, double y) const {
  const Sector& s = sector_at(x, y);
  if (s.fan) {
    const double a = rad2deg(std::atan2(y - ay_, x - ax_));
    return s.fan->state_at_ray(a);
  }
  return s.state;
}

int AnalyticField::region_id(double x, double y) const {
  return sector_at(x, y).region_id;
}

namespace {

// Single full shock line through an anchor: two collinear rays. The
// positive-theta shock puts the turned state on the clockwise side of the
// up-right ray; negative theta mirrors.
AnalyticField single_shock_field(const FlowState& fs, double theta_deg,
                                 double anchor_x, double anchor_y) {
  using Ray = AnalyticField::Ray;
  using Sector = AnalyticField::Sector;
  const double sign = theta_deg >= 0.0 ? 1.0 : -1.0;
  const double beta =
      theta_beta_m(fs.mach(), std::abs(theta_deg), ShockBranch::weak, fs.gamma);
  const auto sol = oblique_shock_downstream(fs, sign * beta);

  std::vector<Ray> rays;
  std::vector<Sector> sectors;
  if (sign > 0.0) {
    rays.push_back({beta - 180.0, DiscontinuityKind::shock, true, "shock"});
    rays.push_back({beta, DiscontinuityKind::shock, false, "shock"});
    sectors.push_back({sol.downstream, std::nullopt, 1, "post_shock"});
    sectors.push_back({fs, std::nullopt, 0, "freestream"});
  } else {
    rays.push_back({-beta, DiscontinuityKind::shock, true, "shock"});
    rays.push_back({180.0 - beta, DiscontinuityKind::shock, false, "shock"});
    sectors.push_back({sol.downstream, std::nullopt, 1, "post_shock"});
    sectors.push_back({fs, std::nullopt, 0, "freestream"});
  }
  AnalyticField f(anchor_x, anchor_y, std::move(rays), std::move(sectors));
  f.max_rankine_hugoniot_residual = rankine_hugoniot_residual(sol);
  return f;
}

// Appends the matched-wave ray(s) and, for fans, the interior fan sector.
// Returns false for a zero-strength wave, in which case the caller must not
// open a new sector (the states on both sides coincide).
bool append_wave(std::vector<AnalyticField::Ray>* rays,
                 std::vector<AnalyticField::Sector>* sectors,
                 const FlowState& upstream, const WaveTurn& wave,
                 int fan_region_id, const std::string& label) {
  if (wave.kind == WaveKind::shock) {
    const double ray_angle = upstream.direction_deg() + wave.shock_angle_deg;
    const bool tie_ccw = wave.shock_angle_deg < 0.0;
    rays->push_back({ray_angle, DiscontinuityKind::shock, tie_ccw, label});
    return true;
  }
  if (wave.kind == WaveKind::expansion) {
    ExpansionFan fan;
    fan.upstream = upstream;
    fan.turn_deg = wave.deflection_deg;
    const double sign = wave.deflection_deg >= 0.0 ? 1.0 : -1.0;
    const double theta0 = upstream.direction_deg();
    const double theta1 = theta0 + wave.deflection_deg;
    const double phi_start = theta0 - sign * mach_angle_deg(upstream.mach());
    const double phi_end = theta1 - sign * mach_angle_deg(wave.state.mach());
    fan.ray_lo_deg = std::min(phi_start, phi_end);
    fan.ray_hi_deg = std::max(phi_start, phi_end);
    rays->push_back(
        {fan.ray_lo_deg, DiscontinuityKind::fan_boundary, true, label});
    sectors->push_back(
        {upstream, fan, fan_region_id, label + "_fan"});
    rays->push_back(
        {fan.ray_hi_deg, DiscontinuityKind::fan_boundary, true, label});
    return true;
  }
  return false;
}

}  // namespace

AnalyticField build_oblique_case(double mach, double theta_deg,
                                 const GridSpec& geometry, double gamma,
                                 double anchor_frac_y) {
  const FlowState fs = freestream(mach, gamma);
  if (theta_deg == 0.0) return AnalyticField::uniform(fs, "freestream");
  return single_shock_field(fs, theta_deg, geometry.x0,
                            geometry.y0 + anchor_frac_y * geometry.ly);
}

AnalyticField build_edney1(double mach, double alpha_lower_deg,
                           double alpha_upper_deg, const GridSpec& geometry,
                           double gamma) {
  using Ray = AnalyticField::Ray;
  using Sector = AnalyticField::Sector;
  const FlowState fs = freestream(mach, gamma);
  const double cx = geometry.x0 + 0.5 * geometry.lx;
  const double cy = geometry.y0 + 0.5 * geometry.ly;
  if (alpha_lower_deg == 0.0 && alpha_upper_deg == 0.0) {
    return AnalyticField::uniform(fs, "freestream");
  }
  if (alpha_upper_deg == 0.0) {
    return single_shock_field(fs, alpha_lower_deg, cx, cy);
  }
  if (alpha_lower_deg == 0.0) {
    return single_shock_field(fs, -alpha_upper_deg, cx, cy);
  }

  const double beta_lo =
      theta_beta_m(mach, alpha_lower_deg, ShockBranch::weak, gamma);
  const double beta_up =
      theta_beta_m(mach, alpha_upper_deg, ShockBranch::weak, gamma);
  const auto sol_lo = oblique_shock_downstream(fs, beta_lo);
  const auto sol_up = oblique_shock_downstream(fs, -beta_up);

  const auto match = match_slip_line(sol_lo.downstream, sol_up.downstream);

  std::vector<Ray> rays;
  std::vector<Sector> sectors;
  // Counterclockwise from the lower incident shock ray (pointing down-left).
  rays.push_back(
      {beta_lo - 180.0, DiscontinuityKind::shock, true, "incident_lower"});
  sectors.push_back({sol_lo.downstream, std::nullopt, 1, "post_lower_shock"});
  if (append_wave(&rays, &sectors, sol_lo.downstream, match.below, 5,
                  "refracted_lower")) {
    sectors.push_back({match.below.state, std::nullopt, 3, "below_slip"});
  }
  rays.push_back(
      {match.slip_angle_deg, DiscontinuityKind::slip, true, "slip_line"});
  sectors.push_back({match.above.state, std::nullopt, 4, "above_slip"});
  if (append_wave(&rays, &sectors, sol_up.downstream, match.above, 6,
                  "refracted_upper")) {
    sectors.push_back({sol_up.downstream, std::nullopt, 2, "post_upper_shock"});
  }
  rays.push_back(
      {180.0 - beta_up, DiscontinuityKind::shock, false, "incident_upper"});
  sectors.push_back({fs, std::nullopt, 0, "freestream"});

  AnalyticField f(cx, cy, std::move(rays), std::move(sectors));
  f.slip_pressure_residual = match.pressure_residual;
  f.slip_direction_residual_rad = match.direction_residual_rad;
  double rh = std::max(rankine_hugoniot_residual(sol_lo),
                       rankine_hugoniot_residual(sol_up));
  rh = std::max(rh, wave_rh_residual(sol_lo.downstream, match.below));
  rh = std::max(rh, wave_rh_residual(sol_up.downstream, match.above));
  f.max_rankine_hugoniot_residual = rh;
  return f;
}

AnalyticField build_edney6(double mach, double alpha1_deg, double alpha2_deg,
                           const GridSpec& geometry, double gamma,
                           RampConvention convention) {
  using Ray = AnalyticField::Ray;
  using Sector = AnalyticField::Sector;
  const FlowState fs = freestream(mach, gamma);
  const double cx = geometry.x0 + 0.5 * geometry.lx;
  const double cy = geometry.y0 + 0.5 * geometry.ly;

  const double total2 = convention == RampConvention::absolute_total
                            ? alpha2_deg
                            : alpha1_deg + alpha2_deg;
  if (alpha1_deg == 0.0 && alpha2_deg == 0.0) {
    return AnalyticField::uniform(fs, "freestream");
  }
  if (alpha2_deg == 0.0) {
    return single_shock_field(fs, alpha1_deg, cx, cy);
  }
  if (alpha1_deg == 0.0) {
    return single_shock_field(fs, total2, cx, cy);
  }
  const double increment = total2 - alpha1_deg;
  if (increment <= 0.0) {
    throw InvalidParams(
        "build_edney6: second ramp must add deflection beyond the first");
  }

  const double beta1 = theta_beta_m(mach, alpha1_deg, ShockBranch::weak, gamma);
  const auto sol1 = oblique_shock_downstream(fs, beta1);
  const double m1 = sol1.downstream.mach();
  const double beta2 = theta_beta_m(m1, increment, ShockBranch::weak, gamma);
  const auto sol2 = oblique_shock_downstream(sol1.downstream, beta2);

  const double ray_shock1 = beta1 - 180.0;
  const double ray_shock2 = alpha1_deg + beta2 - 180.0;
  if (!(ray_shock1 < ray_shock2)) {
    throw NoRegularSolution("build_edney6: ramp shocks do not converge");
  }

  // Below the slip line: the twice-shocked stream; above: the freestream
  // taken through the single merged shock.
  const auto match = match_slip_line(sol2.downstream, fs);
  if (match.above.kind != WaveKind::shock) {
    throw NoRegularSolution(
        "build_edney6: merged wave is not a compression shock");
  }

  std::vector<Ray> rays;
  std::vector<Sector> sectors;
  rays.push_back({ray_shock1, DiscontinuityKind::shock, true, "ramp_shock_1"});
  sectors.push_back({sol1.downstream, std::nullopt, 1, "post_shock_1"});
  rays.push_back({ray_shock2, DiscontinuityKind::shock, true, "ramp_shock_2"});
  sectors.push_back({sol2.downstream, std::nullopt, 2, "post_shock_2"});
  if (append_wave(&rays, &sectors, sol2.downstream, match.below, 5,
                  "reflected")) {
    sectors.push_back({match.below.state, std::nullopt, 3, "below_slip"});
  }
  rays.push_back(
      {match.slip_angle_deg, DiscontinuityKind::slip, true, "slip_line"});
  sectors.push_back({match.above.state, std::nullopt, 4, "merged_downstream"});
  rays.push_back({match.above.shock_angle_deg, DiscontinuityKind::shock, false,
                  "merged_shock"});
  sectors.push_back({fs, std::nullopt, 0, "freestream"});

  AnalyticField f(cx, cy, std::move(rays), std::move(sectors));
  f.slip_pressure_residual = match.pressure_residual;
  f.slip_direction_residual_rad = match.direction_residual_rad;
  double rh = std::max(rankine_hugoniot_residual(sol1),
                       rankine_hugoniot_residual(sol2));
  rh = std::max(rh, wave_rh_residual(sol2.downstream, match.below));
  rh = std::max(rh, wave_rh_residual(fs, match.above));
  f.max_rankine_hugoniot_residual = rh;
  return f;
}

ConservedField project_to_grid(const AnalyticField& field,
                               const GridSpec& grid) {
  double gamma = 1.4;
  if (!field.sectors().empty()) gamma = field.sectors().front().state.gamma;
  ConservedField out(grid, gamma);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      out.set(i, j, primitive_to_conserved(field.evaluate(grid.x(i), grid.y(j))));
    }
  }
  return out;
}

}  // namespace everest
