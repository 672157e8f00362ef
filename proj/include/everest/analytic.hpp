#pragma once

#include <optional>
#include <string>
#include <vector>

#include "everest/gas.hpp"
#include "everest/grid.hpp"

namespace everest {

/// Centered Prandtl-Meyer fan. States on interior rays follow the
/// self-similar solution: the characteristic carrying Mach M sits at ray
/// angle theta(M) - sign(turn) * mu(M) from the fan anchor.
struct ExpansionFan {
  FlowState upstream;
  double turn_deg = 0.0;  // signed total flow turn through the fan
  double ray_lo_deg = 0.0;
  double ray_hi_deg = 0.0;  // boundaries sorted ascending

  FlowState state_at_ray(double ray_angle_deg) const;
};

enum class DiscontinuityKind { shock, slip, fan_boundary, artificial };

/// Piecewise-uniform exact solution: plane sectors around an anchor point,
/// bounded by straight rays (shocks, slip lines, fan characteristics).
class AnalyticField {
 public:
  struct Ray {
    double angle_deg;  // in (-180, 180]
    DiscontinuityKind kind;
    bool tie_ccw;  // a node exactly on the ray joins the ccw-side sector?
    std::string label;
  };

  struct Sector {
    FlowState state;
    std::optional<ExpansionFan> fan;
    int region_id = 0;
    std::string label;
  };

  /// Uniform field (no discontinuities).
  static AnalyticField uniform(const FlowState& s, const std::string& label);

  /// Sectors listed counterclockwise; sector k spans from rays[k] to
  /// rays[k+1] (wrapping). Ray angles must be strictly increasing.
  AnalyticField(double anchor_x, double anchor_y, std::vector<Ray> rays,
                std::vector<Sector> sectors);

  FlowState evaluate(double x, double y) const;
  int region_id(double x, double y) const;

  double anchor_x() const { return ax_; }
  double anchor_y() const { return ay_; }
  const std::vector<Ray>& rays() const { return rays_; }
  const std::vector<Sector>& sectors() const { return sectors_; }

  // Matching diagnostics recorded by the builders.
  double slip_pressure_residual = 0.0;
  double slip_direction_residual_rad = 0.0;
  double max_rankine_hugoniot_residual = 0.0;

 private:
  const Sector& sector_at(double x, double y) const;
  double ax_ = 0.0;
  double ay_ = 0.0;
  std::vector<Ray> rays_;
  std::vector<Sector> sectors_;
};

/// How the second ramp angle of the two-ramp (Edney-VI) case is read:
/// as the total turn from the freestream, or as an increment on top of
/// the first ramp.
enum class RampConvention { absolute_total, relative_increment };

/// Freestream plus one straight oblique shock anchored on the left domain
/// boundary at fraction anchor_frac_y of the height.
AnalyticField build_oblique_case(double mach, double theta_deg,
                                 const GridSpec& geometry, double gamma = 1.4,
                                 double anchor_frac_y = 0.2);

/// Regular crossing of two opposite-family shocks (Edney I) with the
/// interaction point at the domain center. alpha_lower turns the flow up,
/// alpha_upper turns it down.
AnalyticField build_edney1(double mach, double alpha_lower_deg,
                           double alpha_upper_deg, const GridSpec& geometry,
                           double gamma = 1.4);

/// Merging of two same-family ramp shocks (Edney VI) with the merge point
/// at the domain center.
AnalyticField build_edney6(double mach, double alpha1_deg, double alpha2_deg,
                           const GridSpec& geometry, double gamma = 1.4,
                           RampConvention convention =
                               RampConvention::absolute_total);

/// Node-point sampling of the analytic state in conservative variables.
ConservedField project_to_grid(const AnalyticField& field,
                               const GridSpec& grid);

}  // namespace everest
