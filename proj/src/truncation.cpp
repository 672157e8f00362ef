#include "everest/truncation.hpp"

#include "everest/flux.hpp"

namespace everest {

namespace {

// (-f[k-3] + 9 f[k-2] - 45 f[k-1] + 45 f[k+1] - 9 f[k+2] + f[k+3]) / (60 h),
// grouped as paired differences so constant data cancels exactly.
inline double d1_sixth_raw(const double* f, int stride, double inv60h) {
  return ((f[3 * stride] - f[-3 * stride]) -
          9.0 * (f[2 * stride] - f[-2 * stride]) +
          45.0 * (f[stride] - f[-stride])) *
         inv60h;
}

}  // namespace

double stencil_d1_sixth(const std::vector<double>& values, int k, double h) {
  if (k < 3 || k + 3 >= static_cast<int>(values.size())) {
    throw StencilOutOfRange("stencil_d1_sixth: index within 3 nodes of a "
                            "line end");
  }
  return d1_sixth_raw(values.data() + k, 1, 1.0 / (60.0 * h));
}

GridVector high_order_residual(const ConservedField& field, int margin,
                               const std::vector<int>& variables,
                               const std::array<double, 4>& normalization) {
  if (margin < 3) {
    throw StencilOutOfRange("high_order_residual: margin must be >= 3");
  }
  const GridSpec& g = field.grid();
  if (g.nx - 2 * margin < 1 || g.ny - 2 * margin < 1) {
    throw StencilOutOfRange("high_order_residual: margin leaves no interior");
  }

  // Physical flux components at every node, stored per variable as flat
  // row-major planes so the stencil reads contiguous x-lines directly.
  const size_t n = static_cast<size_t>(g.nx) * g.ny;
  std::vector<double> fx(n * 4), gy(n * 4);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const FlowState s = field.state(i, j);
      const Conserved f = flux_x(s);
      const Conserved gq = flux_y(s);
      const size_t idx = static_cast<size_t>(j) * g.nx + i;
      for (int v = 0; v < 4; ++v) {
        fx[v * n + idx] = f[v];
        gy[v * n + idx] = gq[v];
      }
    }
  }

  GridVector out;
  out.grid = g;
  out.margin = margin;
  out.variables = variables;
  out.normalization = normalization;
  out.values.reserve(static_cast<size_t>(out.interior_nx()) *
                     out.interior_ny() * variables.size());
  const double ix = 1.0 / (60.0 * g.hx());
  const double iy = 1.0 / (60.0 * g.hy());
  for (int j = margin; j < g.ny - margin; ++j) {
    for (int i = margin; i < g.nx - margin; ++i) {
      const size_t idx = static_cast<size_t>(j) * g.nx + i;
      for (int v : variables) {
        const double ddx = d1_sixth_raw(fx.data() + v * n + idx, 1, ix);
        const double ddy = d1_sixth_raw(gy.data() + v * n + idx, g.nx, iy);
        out.values.push_back((ddx + ddy) / normalization[v]);
      }
    }
  }
  return out;
}

}  // namespace everest
