#pragma once

#include "everest/gridvector.hpp"

namespace everest {

/// Sixth-order central first derivative on a uniform line. k indexes into
/// values and must sit at least 3 nodes from each end.
double stencil_d1_sixth(const std::vector<double>& values, int k, double h);

/// Steady flux-divergence residual dF/dx + dG/dy evaluated with the
/// sixth-order stencil at every interior node (margin >= 3 layers dropped).
/// For a converged steady solution this is the truncation-error estimate of
/// the producing scheme plus the (much smaller) postprocessor term.
GridVector high_order_residual(const ConservedField& field, int margin = 3,
                               const std::vector<int>& variables =
                                   all_variables(),
                               const std::array<double, 4>& normalization =
                                   freestream_normalization());

}  // namespace everest
