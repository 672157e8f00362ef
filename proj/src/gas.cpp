#include "everest/gas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace everest {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace

double FlowState::sound_speed() const { return std::sqrt(gamma * p / rho); }
double FlowState::speed() const { return std::hypot(u, v); }
double FlowState::mach() const { return speed() / sound_speed(); }
double FlowState::direction_rad() const { return std::atan2(v, u); }
double FlowState::direction_deg() const { return rad2deg(direction_rad()); }
double FlowState::entropy_function() const { return p / std::pow(rho, gamma); }
double FlowState::specific_enthalpy() const {
  return gamma / (gamma - 1.0) * p / rho;
}
double FlowState::total_enthalpy() const {
  return specific_enthalpy() + 0.5 * (u * u + v * v);
}

FlowState freestream(double mach, double gamma) {
  return FlowState{1.0, mach, 0.0, 1.0 / gamma, gamma};
}

Conserved primitive_to_conserved(const FlowState& s) {
  const double e = s.p / (s.rho * (s.gamma - 1.0));
  const double E = e + 0.5 * (s.u * s.u + s.v * s.v);
  return {s.rho, s.rho * s.u, s.rho * s.v, s.rho * E};
}

FlowState conserved_to_primitive(const Conserved& q, double gamma) {
  if (!(q[0] > 0.0)) {
    throw NonPhysicalState("conserved_to_primitive: rho = " +
                           std::to_string(q[0]));
  }
  const double u = q[1] / q[0];
  const double v = q[2] / q[0];
  const double p = (gamma - 1.0) * (q[3] - 0.5 * q[0] * (u * u + v * v));
  if (!(p > 0.0)) {
    throw NonPhysicalState("conserved_to_primitive: p = " + std::to_string(p));
  }
  return FlowState{q[0], u, v, p, gamma};
}

double deflection_from_shock_angle_deg(double mach, double beta_deg,
                                       double gamma) {
  const double b = deg2rad(beta_deg);
  const double m2 = mach * mach;
  const double sb = std::sin(b);
  const double num = m2 * sb * sb - 1.0;
  const double den = m2 * (gamma + std::cos(2.0 * b)) + 2.0;
  return rad2deg(std::atan(2.0 / std::tan(b) * num / den));
}

namespace {

// theta(beta) is unimodal on (Mach angle, 90 deg); golden-section search
// for the wave angle of maximum deflection.
double max_deflection_angle_beta_deg(double mach, double gamma) {
  double lo = rad2deg(std::asin(1.0 / mach));
  double hi = 90.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = deflection_from_shock_angle_deg(mach, c, gamma);
  double fd = deflection_from_shock_angle_deg(mach, d, gamma);
  for (int it = 0; it < 200 && (hi - lo) > 1e-14; ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = deflection_from_shock_angle_deg(mach, c, gamma);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = deflection_from_shock_angle_deg(mach, d, gamma);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double max_deflection_deg(double mach, double gamma) {
  if (!(mach > 1.0)) throw SubsonicNormalMach("max_deflection_deg: M <= 1");
  const double beta_peak = max_deflection_angle_beta_deg(mach, gamma);
  return deflection_from_shock_angle_deg(mach, beta_peak, gamma);
}

double theta_beta_m(double mach, double theta_deg, ShockBranch branch,
                    double gamma) {
  if (!(mach > 1.0)) throw SubsonicNormalMach("theta_beta_m: M <= 1");
  if (theta_deg < 0.0) throw InvalidParams("theta_beta_m: theta < 0");
  const double mu_deg = rad2deg(std::asin(1.0 / mach));
  if (theta_deg == 0.0) {
    return branch == ShockBranch::weak ? mu_deg : 90.0;
  }
  const double beta_peak = max_deflection_angle_beta_deg(mach, gamma);
  const double theta_max = deflection_from_shock_angle_deg(mach, beta_peak, gamma);
  if (theta_deg >= theta_max) {
    throw DetachedShock("theta_beta_m: deflection " + std::to_string(theta_deg) +
                        " deg exceeds max " + std::to_string(theta_max) +
                        " deg at M = " + std::to_string(mach));
  }
  auto f = [&](double beta) {
    return deflection_from_shock_angle_deg(mach, beta, gamma) - theta_deg;
  };
  double lo, hi;
  if (branch == ShockBranch::weak) {
    lo = mu_deg;
    hi = beta_peak;
  } else {
    lo = beta_peak;
    hi = 90.0;
  }
  double f_lo = f(lo), f_hi = f(hi);
  // On the weak branch f(mu) = -theta < 0 and f(beta_peak) > 0.
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw DetachedShock("theta_beta_m: no bracket for branch");
  }
  return detail::solve_bracketed(f, lo, hi, f_lo, f_hi);
}

ObliqueShockSolution oblique_shock_downstream(const FlowState& upstream,
                                              double shock_angle_deg) {
  const double g = upstream.gamma;
  const double mach = upstream.mach();
  const double beta = deg2rad(std::abs(shock_angle_deg));
  const double mn1 = mach * std::sin(beta);
  if (!(mn1 > 1.0)) {
    throw SubsonicNormalMach("oblique_shock_downstream: M sin(beta) = " +
                             std::to_string(mn1));
  }
  const double mn1sq = mn1 * mn1;
  const double p_ratio = (2.0 * g * mn1sq - (g - 1.0)) / (g + 1.0);
  const double rho_ratio = (g + 1.0) * mn1sq / ((g - 1.0) * mn1sq + 2.0);

  const double q1 = upstream.speed();
  const double un1 = q1 * std::sin(beta);
  const double ut = q1 * std::cos(beta);
  const double un2 = un1 / rho_ratio;
  const double theta = beta - std::atan2(un2, ut);  // turn magnitude
  const double sign = shock_angle_deg >= 0.0 ? 1.0 : -1.0;

  const double phi2 = upstream.direction_rad() + sign * theta;
  const double q2 = std::hypot(un2, ut);
  FlowState down{upstream.rho * rho_ratio, q2 * std::cos(phi2),
                 q2 * std::sin(phi2), upstream.p * p_ratio, g};
  return ObliqueShockSolution{upstream, sign * rad2deg(theta), shock_angle_deg,
                              down};
}

double rankine_hugoniot_residual(const ObliqueShockSolution& sol) {
  const FlowState& a = sol.upstream;
  const FlowState& b = sol.downstream;
  const double beta = deg2rad(std::abs(sol.shock_angle_deg));
  const double sign = sol.shock_angle_deg >= 0.0 ? 1.0 : -1.0;
  // Unit normal of the shock plane, pointing downstream.
  const double phi1 = a.direction_rad();
  const double nx = std::cos(phi1 - sign * (kPi / 2.0 - beta));
  const double ny = std::sin(phi1 - sign * (kPi / 2.0 - beta));
  const double un_a = a.u * nx + a.v * ny;
  const double un_b = b.u * nx + b.v * ny;
  const double tx = -ny, ty = nx;
  const double ut_a = a.u * tx + a.v * ty;
  const double ut_b = b.u * tx + b.v * ty;

  const double mass_a = a.rho * un_a;
  const double mass_b = b.rho * un_b;
  const double mom_a = a.rho * un_a * un_a + a.p;
  const double mom_b = b.rho * un_b * un_b + b.p;
  const double en_a = a.total_enthalpy();
  const double en_b = b.total_enthalpy();

  double r = std::abs(mass_a - mass_b) / std::abs(mass_a);
  r = std::max(r, std::abs(mom_a - mom_b) / std::abs(mom_a));
  r = std::max(r, std::abs(en_a - en_b) / std::abs(en_a));
  r = std::max(r, std::abs(ut_a - ut_b) / std::max(1.0, std::abs(ut_a)));
  return r;
}

double prandtl_meyer_nu_deg(double mach, double gamma) {
  if (mach < 1.0) throw SubsonicInput("prandtl_meyer_nu_deg: M < 1");
  const double k = (gamma + 1.0) / (gamma - 1.0);
  const double m2m1 = mach * mach - 1.0;
  const double nu = std::sqrt(k) * std::atan(std::sqrt(m2m1 / k)) -
                    std::atan(std::sqrt(m2m1));
  return rad2deg(nu);
}

double prandtl_meyer_nu_max_deg(double gamma) {
  return rad2deg(kPi / 2.0 * (std::sqrt((gamma + 1.0) / (gamma - 1.0)) - 1.0));
}

double prandtl_meyer_mach(double nu_deg, double gamma) {
  if (nu_deg < 0.0) throw SubsonicInput("prandtl_meyer_mach: nu < 0");
  if (nu_deg >= prandtl_meyer_nu_max_deg(gamma)) {
    throw NoRegularSolution("prandtl_meyer_mach: nu beyond vacuum limit");
  }
  if (nu_deg == 0.0) return 1.0;
  auto f = [&](double m) { return prandtl_meyer_nu_deg(m, gamma) - nu_deg; };
  double hi = 2.0;
  while (f(hi) < 0.0) hi *= 2.0;
  return detail::solve_bracketed(f, 1.0, hi, f(1.0), f(hi));
}

FlowState prandtl_meyer_turn(const FlowState& s, double delta_deg) {
  const double g = s.gamma;
  const double m1 = s.mach();
  const double nu2 = prandtl_meyer_nu_deg(m1, g) + std::abs(delta_deg);
  const double m2 = prandtl_meyer_mach(nu2, g);
  const double t_ratio = (1.0 + 0.5 * (g - 1.0) * m1 * m1) /
                         (1.0 + 0.5 * (g - 1.0) * m2 * m2);
  const double p2 = s.p * std::pow(t_ratio, g / (g - 1.0));
  const double rho2 = s.rho * std::pow(t_ratio, 1.0 / (g - 1.0));
  const double a2 = std::sqrt(g * p2 / rho2);
  const double phi2 = s.direction_rad() + deg2rad(delta_deg);
  return FlowState{rho2, m2 * a2 * std::cos(phi2), m2 * a2 * std::sin(phi2),
                   p2, g};
}

WaveTurn turn_to_direction(const FlowState& s, double target_dir_deg,
                           StreamSide side) {
  const double delta = target_dir_deg - s.direction_deg();
  WaveTurn out;
  out.deflection_deg = delta;
  if (std::abs(delta) < 1e-14) {
    out.state = s;
    out.kind = WaveKind::none;
    return out;
  }
  const bool compressive =
      (side == StreamSide::below_slip) ? (delta < 0.0) : (delta > 0.0);
  if (compressive) {
    const double sign = delta < 0.0 ? -1.0 : 1.0;
    const double beta =
        theta_beta_m(s.mach(), std::abs(delta), ShockBranch::weak, s.gamma);
    const auto sol = oblique_shock_downstream(s, sign * beta);
    out.state = sol.downstream;
    out.kind = WaveKind::shock;
    out.shock_angle_deg = sign * beta;
  } else {
    out.state = prandtl_meyer_turn(s, delta);
    out.kind = WaveKind::expansion;
  }
  return out;
}

namespace {

// Signed pressure mismatch between the two wave paths at slip direction d.
double slip_mismatch(const FlowState& below, const FlowState& above,
                     double dir_deg) {
  const auto lo = turn_to_direction(below, dir_deg, StreamSide::below_slip);
  const auto hi = turn_to_direction(above, dir_deg, StreamSide::above_slip);
  return lo.state.p - hi.state.p;
}

/// Admissible slip-direction range for one stream: shocks limited by
// detachment, expansions by the vacuum limit (with a small guard).
void admissible_range(const FlowState& s, StreamSide side, double* lo,
                      double* hi) {
  const double dir = s.direction_deg();
  const double theta_max = max_deflection_deg(s.mach(), s.gamma);
  const double nu_room =
      prandtl_meyer_nu_max_deg(s.gamma) - prandtl_meyer_nu_deg(s.mach(), s.gamma);
  const double shock_room = theta_max - 1e-9;
  const double fan_room = nu_room - 1e-9;
  if (side == StreamSide::below_slip) {
    *lo = dir - shock_room;
    *hi = dir + fan_room;
  } else {
    *lo = dir - fan_room;
    *hi = dir + shock_room;
  }
}

}  // namespace

SlipLineMatch match_slip_line(const FlowState& below, const FlowState& above) {
  if (!(below.mach() > 1.0) || !(above.mach() > 1.0)) {
    throw NoRegularSolution("match_slip_line: both streams must be supersonic");
  }
  double lo_b, hi_b, lo_a, hi_a;
  admissible_range(below, StreamSide::below_slip, &lo_b, &hi_b);
  admissible_range(above, StreamSide::above_slip, &lo_a, &hi_a);
  const double lo = std::max(lo_b, lo_a);
  const double hi = std::min(hi_b, hi_a);
  if (!(lo < hi)) {
    throw NoRegularSolution("match_slip_line: empty admissible direction range");
  }
  auto f = [&](double d) { return slip_mismatch(below, above, d); };

  // Scan for a sign change; the mismatch is monotone in practice but the
  // scan keeps the bracket search robust near detachment.
  constexpr int kScan = 256;
  double prev_x = lo, prev_f = f(lo);
  double root_lo = 0.0, root_hi = 0.0, f_lo = 0.0, f_hi = 0.0;
  bool bracketed = false;
  for (int i = 1; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / kScan;
    const double fx = f(x);
    if ((prev_f < 0.0) != (fx < 0.0)) {
      root_lo = prev_x;
      root_hi = x;
      f_lo = prev_f;
      f_hi = fx;
      bracketed = true;
      break;
    }
    prev_x = x;
    prev_f = fx;
  }
  if (!bracketed) {
    throw NoRegularSolution("match_slip_line: no sign change of the pressure "
                            "mismatch on the admissible range");
  }
  const double delta = detail::solve_bracketed(f, root_lo, root_hi, f_lo, f_hi);

  SlipLineMatch m;
  m.slip_angle_deg = delta;
  m.below = turn_to_direction(below, delta, StreamSide::below_slip);
  m.above = turn_to_direction(above, delta, StreamSide::above_slip);
  m.pressure_residual =
      std::abs(m.below.state.p - m.above.state.p) / m.below.state.p;
  m.direction_residual_rad =
      std::abs(m.below.state.direction_rad() - m.above.state.direction_rad());
  return m;
}

}  // namespace everest
