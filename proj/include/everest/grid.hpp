#pragma once

#include <cstddef>
#include <vector>

#include "everest/gas.hpp"

namespace everest {

/// Uniform structured node grid on [x0, x0+lx] x [y0, y0+ly].
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double lx = 1.0;
  double ly = 1.0;

  double hx() const { return lx / (nx - 1); }
  double hy() const { return ly / (ny - 1); }
  double x(int i) const { return x0 + i * hx(); }
  double y(int j) const { return y0 + j * hy(); }
  long nodes() const { return static_cast<long>(nx) * ny; }

  bool operator==(const GridSpec&) const = default;
};

/// Grid function of conservative variables (rho, rho*u, rho*v, rho*E),
/// row-major over y then x: index(i, j) = j*nx + i.
class ConservedField {
 public:
  ConservedField() = default;
  ConservedField(const GridSpec& grid, double gamma)
      : grid_(grid), gamma_(gamma), data_(grid.nodes() * 4, 0.0) {}

  const GridSpec& grid() const { return grid_; }
  double gamma() const { return gamma_; }

  long node_index(int i, int j) const {
    return static_cast<long>(j) * grid_.nx + i;
  }
  double* at(int i, int j) { return data_.data() + 4 * node_index(i, j); }
  const double* at(int i, int j) const {
    return data_.data() + 4 * node_index(i, j);
  }

  void set(int i, int j, const Conserved& q) {
    double* d = at(i, j);
    for (int c = 0; c < 4; ++c) d[c] = q[c];
  }
  Conserved get(int i, int j) const {
    const double* d = at(i, j);
    return {d[0], d[1], d[2], d[3]};
  }
  /// Throws NonPhysicalState if the node does not decode.
  FlowState state(int i, int j) const {
    return conserved_to_primitive(get(i, j), gamma_);
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

 private:
  GridSpec grid_;
  double gamma_ = 1.4;
  std::vector<double> data_;
};

}  // namespace everest
