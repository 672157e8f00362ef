#pragma once

#include <cstdint>

namespace everest {

enum class McMethod {
  radial,  // exact 1D marginal of the cosine (fast, default)
  pairs,   // literal pairs of normalized Gaussian vectors
};

struct McResult {
  int dim = 0;
  double delta = 0.0;
  long samples = 0;
  long exceed_count = 0;
  double empirical = 0.0;  // fraction with cosine > delta
  double bound = 0.0;      // sqrt(pi/2) exp(-delta^2 dim / 2)
  double mean_cosine = 0.0;
};

/// Empirical probability that two independent uniform unit vectors in R^dim
/// have cosine above delta, against the concentration bound.
McResult mc_orthogonality(int dim, long samples, double delta, uint64_t seed,
                          McMethod method = McMethod::radial);

}  // namespace everest
