#pragma once

#include <array>
#include <cmath>

#include "everest/errors.hpp"

namespace everest {

/// Primitive gas state. Nondimensionalization used throughout the project:
/// freestream rho = 1, p = 1/gamma, so the freestream sound speed is 1 and
/// speeds coincide with Mach numbers.
struct FlowState {
  double rho;
  double u;
  double v;
  double p;
  double gamma = 1.4;

  double sound_speed() const;
  double speed() const;
  double mach() const;
  /// Flow direction, radians, atan2(v, u).
  double direction_rad() const;
  double direction_deg() const;
  /// p / rho^gamma; any monotone entropy function works for jump checks.
  double entropy_function() const;
  double specific_enthalpy() const;  // gamma/(gamma-1) * p/rho
  double total_enthalpy() const;     // h + (u^2+v^2)/2
  bool valid() const { return rho > 0.0 && p > 0.0 && gamma > 1.0; }
};

/// Freestream at Mach `mach` moving in +x under the project scaling.
FlowState freestream(double mach, double gamma = 1.4);

using Conserved = std::array<double, 4>;  // rho, rho*u, rho*v, rho*E

Conserved primitive_to_conserved(const FlowState& s);

/// Throws NonPhysicalState when rho <= 0 or the recovered pressure <= 0.
FlowState conserved_to_primitive(const Conserved& q, double gamma);

enum class ShockBranch { weak, strong };

/// Largest attainable deflection (degrees) for an attached oblique shock.
double max_deflection_deg(double mach, double gamma = 1.4);

/// Deflection theta (degrees) produced by a shock at wave angle beta.
double deflection_from_shock_angle_deg(double mach, double beta_deg,
                                       double gamma = 1.4);

/// Inverts the theta-beta-M relation for the wave angle beta (degrees).
/// Throws DetachedShock when theta exceeds max_deflection_deg.
double theta_beta_m(double mach, double theta_deg,
                    ShockBranch branch = ShockBranch::weak,
                    double gamma = 1.4);

struct ObliqueShockSolution {
  FlowState upstream;
  double deflection_deg;   // signed, same sign as shock_angle_deg
  double shock_angle_deg;  // signed, measured from the upstream flow direction
  FlowState downstream;
};

/// Exact jump relations across an oblique shock. The shock angle is signed
/// and measured from the upstream flow direction; positive angles deflect
/// the flow counterclockwise. Throws SubsonicNormalMach when M sin|beta| <= 1.
ObliqueShockSolution oblique_shock_downstream(const FlowState& upstream,
                                              double shock_angle_deg);

/// Max-norm of the Rankine-Hugoniot residual (mass, normal momentum, energy
/// fluxes in the shock frame), relative to the upstream flux magnitudes.
double rankine_hugoniot_residual(const ObliqueShockSolution& sol);

/// Prandtl-Meyer function, degrees. Throws SubsonicInput for M < 1.
double prandtl_meyer_nu_deg(double mach, double gamma = 1.4);

/// Vacuum limit of the Prandtl-Meyer function, degrees.
double prandtl_meyer_nu_max_deg(double gamma = 1.4);

/// Inverse of prandtl_meyer_nu_deg.
double prandtl_meyer_mach(double nu_deg, double gamma = 1.4);

/// Isentropic turn through a centered expansion by the signed angle delta.
/// Throws NoRegularSolution if the turn exceeds the vacuum limit.
FlowState prandtl_meyer_turn(const FlowState& s, double delta_deg);

/// Which side of the slip line a stream occupies; fixes the admissible wave
/// family: a stream below the slip line is compressed by turns toward
/// negative angles, a stream above by turns toward positive angles.
enum class StreamSide { below_slip, above_slip };

enum class WaveKind { none, shock, expansion };

struct WaveTurn {
  FlowState state;
  WaveKind kind = WaveKind::none;
  /// For shocks: signed wave angle from the pre-wave flow direction.
  double shock_angle_deg = 0.0;
  double deflection_deg = 0.0;  // signed turn applied
};

/// Turn a supersonic stream to the absolute direction target_dir_deg through
/// the single admissible wave for its side (shock when compressive,
/// expansion fan otherwise).
WaveTurn turn_to_direction(const FlowState& s, double target_dir_deg,
                           StreamSide side);

struct SlipLineMatch {
  double slip_angle_deg;
  WaveTurn below;  // stream that ends up below the slip line
  WaveTurn above;  // stream that ends up above the slip line
  double pressure_residual;       // |p_below - p_above| / p_below
  double direction_residual_rad;  // |angle mismatch|
};

/// Pressure/direction matching across a slip line: finds the common flow
/// direction such that both streams, each turned through its admissible
/// wave, reach equal pressure. Throws NoRegularSolution when the mismatch
/// function has no root in the admissible range of directions.
SlipLineMatch match_slip_line(const FlowState& below, const FlowState& above);

namespace detail {
/// Bisection to a tight bracket followed by secant polishing.
/// `f` must change sign on [lo, hi].
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double f_lo, double f_hi,
                       int max_iter = 200) {
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  // Secant polish inside the final bracket.
  double x0 = a, x1 = b, f0 = fa, f1 = fb;
  for (int it = 0; it < 8; ++it) {
    if (f1 == f0) break;
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (!(x2 >= lo && x2 <= hi)) break;
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f(x1);
    if (f1 == 0.0) break;
  }
  return (std::abs(f1) < std::abs(f0)) ? x1 : x0;
}
}  // namespace detail

}  // namespace everest
