#pragma once

#include "everest/gas.hpp"

namespace everest {

/// Physical Euler fluxes of the conservative state (rho, rho u, rho v,
/// rho E).
inline Conserved flux_x(const FlowState& s) {
  const double rE = s.rho * (s.p / (s.rho * (s.gamma - 1.0)) +
                             0.5 * (s.u * s.u + s.v * s.v));
  return {s.rho * s.u, s.rho * s.u * s.u + s.p, s.rho * s.u * s.v,
          s.u * (rE + s.p)};
}

inline Conserved flux_y(const FlowState& s) {
  const double rE = s.rho * (s.p / (s.rho * (s.gamma - 1.0)) +
                             0.5 * (s.u * s.u + s.v * s.v));
  return {s.rho * s.v, s.rho * s.u * s.v, s.rho * s.v * s.v + s.p,
          s.v * (rE + s.p)};
}

inline Conserved flux_x(const Conserved& q, double gamma) {
  return flux_x(conserved_to_primitive(q, gamma));
}

inline Conserved flux_y(const Conserved& q, double gamma) {
  return flux_y(conserved_to_primitive(q, gamma));
}

}  // namespace everest
