#include "everest/concentration.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "everest/errors.hpp"

namespace everest {

// The cosine between two independent uniform unit vectors in R^N has the
// same law as the first coordinate of one such vector (rotate the second
// onto an axis): cos = g / sqrt(g^2 + s) with g ~ N(0,1) and s ~ chi^2_{N-1}.
// The radial method samples this 1D marginal directly; the pairs method
// materializes both vectors and is kept as a cross-check.
McResult mc_orthogonality(int dim, long samples, double delta, uint64_t seed,
                          McMethod method) {
  if (dim < 2 || samples < 1 || !(delta > 0.0) || !(delta < 1.0)) {
    throw InvalidParams(
        "mc_orthogonality: need dim >= 2, samples >= 1, delta in (0, 1)");
  }
  McResult r;
  r.dim = dim;
  r.delta = delta;
  r.samples = samples;
  r.bound = std::sqrt(std::numbers::pi / 2.0) *
            std::exp(-0.5 * delta * delta * dim);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double cos_sum = 0.0;
  long exceed = 0;

  if (method == McMethod::radial) {
    std::gamma_distribution<double> chi2(0.5 * (dim - 1), 2.0);
    for (long it = 0; it < samples; ++it) {
      const double g = gauss(rng);
      const double s = chi2(rng);
      const double c = g / std::sqrt(g * g + s);
      cos_sum += c;
      if (c > delta) exceed++;
    }
  } else {
    std::vector<double> a(dim), b(dim);
    for (long it = 0; it < samples; ++it) {
      double aa = 0.0, bb = 0.0, ab = 0.0;
      for (int i = 0; i < dim; ++i) {
        a[i] = gauss(rng);
        b[i] = gauss(rng);
        aa += a[i] * a[i];
        bb += b[i] * b[i];
        ab += a[i] * b[i];
      }
      const double c = ab / std::sqrt(aa * bb);
      cos_sum += c;
      if (c > delta) exceed++;
    }
  }
  r.exceed_count = exceed;
  r.empirical = double(exceed) / double(samples);
  r.mean_cosine = cos_sum / double(samples);
  return r;
}

}  // namespace everest
