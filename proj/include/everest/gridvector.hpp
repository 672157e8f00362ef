#pragma once

#include <array>
#include <vector>

#include "everest/errors.hpp"
#include "everest/grid.hpp"

namespace everest {

/// Flattened grid function over the interior node mask: the margin outermost
/// node layers are dropped on every side, the surviving nodes are walked in
/// row-major (j, then i) order, and the selected conservative components are
/// emitted per node, each divided by its normalization scale.
struct GridVector {
  GridSpec grid;
  int margin = 3;
  std::vector<int> variables;  // conservative component indices, ascending
  std::array<double, 4> normalization{1.0, 1.0, 1.0, 1.0};
  std::vector<double> values;

  int interior_nx() const { return grid.nx - 2 * margin; }
  int interior_ny() const { return grid.ny - 2 * margin; }
  long size() const { return static_cast<long>(values.size()); }

  bool metadata_equal(const GridVector& o) const {
    return grid == o.grid && margin == o.margin && variables == o.variables &&
           normalization == o.normalization;
  }
};

inline std::vector<int> all_variables() { return {0, 1, 2, 3}; }

/// Freestream-magnitude scales (rho, rho a, rho a, rho a^2); all ones under
/// the project scaling rho_inf = 1, a_inf = 1.
inline std::array<double, 4> freestream_normalization(double rho_inf = 1.0,
                                                      double a_inf = 1.0) {
  return {rho_inf, rho_inf * a_inf, rho_inf * a_inf, rho_inf * a_inf * a_inf};
}

GridVector error_vector(const ConservedField& numerical,
                        const ConservedField& exact, int margin = 3,
                        const std::vector<int>& variables = all_variables(),
                        const std::array<double, 4>& normalization =
                            freestream_normalization());

double inner_product(const GridVector& a, const GridVector& b);

/// L2 norm with the uniform cell-area factor sqrt(hx*hy) applied.
double l2_norm(const GridVector& a);

/// L2 distance ||a - b|| with the cell-area factor applied.
double l2_distance(const GridVector& a, const GridVector& b);

/// Angle in degrees from the uncentered cosine (arccos of the cosine
/// similarity, clamped into [-1, 1]). With centered = true the entry means
/// are removed first (the statistical Pearson variant).
double angle_between(const GridVector& a, const GridVector& b,
                     bool centered = false);

using SquareMatrix = std::vector<std::vector<double>>;

SquareMatrix pairwise_angles(const std::vector<GridVector>& vectors,
                             bool centered = false);

struct AngleSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int pairs = 0;
};

AngleSummary angle_summary(const SquareMatrix& matrix);

}  // namespace everest
