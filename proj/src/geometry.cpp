#include <algorithm>
#include <cmath>
#include <numbers>

#include "everest/gridvector.hpp"

namespace everest {

namespace {

void require_metadata(const GridVector& a, const GridVector& b) {
  if (!a.metadata_equal(b) || a.values.size() != b.values.size()) {
    throw MetadataMismatch("grid vectors carry incompatible metadata");
  }
}

double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

GridVector error_vector(const ConservedField& numerical,
                        const ConservedField& exact, int margin,
                        const std::vector<int>& variables,
                        const std::array<double, 4>& normalization) {
  if (!(numerical.grid() == exact.grid())) {
    throw GridMismatch("error_vector: fields live on different grids");
  }
  const GridSpec& g = numerical.grid();
  if (margin < 0 || g.nx - 2 * margin < 1 || g.ny - 2 * margin < 1) {
    throw GridMismatch("error_vector: mask margin leaves no interior nodes");
  }
  GridVector out;
  out.grid = g;
  out.margin = margin;
  out.variables = variables;
  out.normalization = normalization;
  out.values.reserve(static_cast<size_t>(out.interior_nx()) *
                     out.interior_ny() * variables.size());
  for (int j = margin; j < g.ny - margin; ++j) {
    for (int i = margin; i < g.nx - margin; ++i) {
      const Conserved qn = numerical.get(i, j);
      const Conserved qe = exact.get(i, j);
      for (int v : variables) {
        out.values.push_back((qn[v] - qe[v]) / normalization[v]);
      }
    }
  }
  return out;
}

double inner_product(const GridVector& a, const GridVector& b) {
  require_metadata(a, b);
  double acc = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
  return acc;
}

double l2_norm(const GridVector& a) {
  return std::sqrt(inner_product(a, a) * a.grid.hx() * a.grid.hy());
}

double l2_distance(const GridVector& a, const GridVector& b) {
  require_metadata(a, b);
  double acc = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    acc += d * d;
  }
  return std::sqrt(acc * a.grid.hx() * a.grid.hy());
}

double angle_between(const GridVector& a, const GridVector& b, bool centered) {
  require_metadata(a, b);
  double ab = 0.0, aa = 0.0, bb = 0.0;
  const double ma = centered ? mean(a.values) : 0.0;
  const double mb = centered ? mean(b.values) : 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    const double x = a.values[i] - ma;
    const double y = b.values[i] - mb;
    ab += x * y;
    aa += x * x;
    bb += y * y;
  }
  if (aa == 0.0 || bb == 0.0) {
    throw ZeroVector("angle_between: zero-norm operand");
  }
  const double c = std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

SquareMatrix pairwise_angles(const std::vector<GridVector>& vectors,
                             bool centered) {
  const size_t k = vectors.size();
  if (k < 2) throw InvalidParams("pairwise_angles: need at least two vectors");
  SquareMatrix m(k, std::vector<double>(k, 0.0));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      m[i][j] = m[j][i] = angle_between(vectors[i], vectors[j], centered);
    }
  }
  return m;
}

AngleSummary angle_summary(const SquareMatrix& matrix) {
  AngleSummary s;
  const size_t k = matrix.size();
  if (k < 2) return s;
  s.min = 1e300;
  s.max = -1e300;
  double acc = 0.0;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      acc += matrix[i][j];
      s.min = std::min(s.min, matrix[i][j]);
      s.max = std::max(s.max, matrix[i][j]);
      s.pairs++;
    }
  }
  s.mean = acc / s.pairs;
  return s;
}

}  // namespace everest
