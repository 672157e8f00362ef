#include "everest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace everest {

SquareMatrix distance_matrix(const std::vector<GridVector>& solutions) {
  const size_t k = solutions.size();
  SquareMatrix m(k, std::vector<double>(k, 0.0));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      m[i][j] = m[j][i] = l2_distance(solutions[i], solutions[j]);
    }
  }
  return m;
}

double pair_bound(double d12) { return d12; }

double hypercircle_estimate(double d12) { return 0.5 * d12; }

double dk_max(const SquareMatrix& distances, int k) {
  double best = 0.0;
  for (double d : distances.at(k)) best = std::max(best, d);
  return best;
}

double ensemble_width(const SquareMatrix& distances) {
  double best = 0.0;
  for (const auto& row : distances) {
    for (double d : row) best = std::max(best, d);
  }
  return best;
}

double angle_bound(double d12, double alpha_deg, bool exact_constant) {
  if (!(alpha_deg > 0.0) || alpha_deg > 180.0) {
    throw DegenerateAngle("angle_bound: angle must lie in (0, 180] degrees");
  }
  // cos(arctan 2) + 2 sin(arctan 2) = (1 + 4) / sqrt(5) = sqrt(5).
  const double coef = exact_constant ? 0.5 * std::sqrt(5.0) : 1.1;
  return coef * d12 / std::sin(0.5 * alpha_deg * std::numbers::pi / 180.0);
}

double alpha_from_beta(double beta_deg) {
  if (!(beta_deg > 0.0) || beta_deg > 180.0) {
    throw DegenerateAngle("alpha_from_beta: angle must lie in (0, 180]");
  }
  return beta_deg / 3.0;
}

double effectivity(double estimate_norm, double true_norm) {
  if (!(true_norm > 0.0)) {
    throw ZeroTrueError("effectivity: true error norm is not positive");
  }
  return estimate_norm / true_norm;
}

double max_triangle_violation(const SquareMatrix& d) {
  const size_t k = d.size();
  double worst = -1e300;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      for (size_t l = 0; l < k; ++l) {
        worst = std::max(worst, d[i][l] - (d[i][j] + d[j][l]));
      }
    }
  }
  return worst;
}

EnsembleReport analyze_ensemble(const std::vector<std::string>& ids,
                                const std::vector<GridVector>& solutions,
                                const std::vector<GridVector>& errors,
                                const std::vector<GridVector>& truncations) {
  const size_t k = ids.size();
  if (k < 2 || solutions.size() != k || errors.size() != k ||
      truncations.size() != k) {
    throw InvalidParams("analyze_ensemble: need >= 2 aligned ensemble members");
  }

  EnsembleReport rep;
  rep.ids = ids;
  rep.distances = distance_matrix(solutions);
  rep.alpha = pairwise_angles(errors);
  rep.beta = pairwise_angles(truncations);
  rep.alpha_summary = angle_summary(rep.alpha);
  rep.beta_summary = angle_summary(rep.beta);
  rep.width = ensemble_width(rep.distances);
  rep.true_norms.reserve(k);
  for (const auto& e : errors) rep.true_norms.push_back(l2_norm(e));

  int ok_beta3 = 0;
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      PairEstimate pe;
      pe.k = static_cast<int>(i);
      pe.m = static_cast<int>(j);
      pe.distance = rep.distances[i][j];
      pe.alpha_deg = rep.alpha[i][j];
      pe.beta_deg = rep.beta[i][j];
      pe.bound_beta3 = angle_bound(pe.distance, alpha_from_beta(pe.beta_deg));
      pe.bound_direct = angle_bound(pe.distance, pe.alpha_deg);
      const double larger = std::max(rep.true_norms[i], rep.true_norms[j]);
      pe.eff_beta3 = effectivity(pe.bound_beta3, larger);
      pe.eff_direct = effectivity(pe.bound_direct, larger);
      pe.eff_pair_k = effectivity(pair_bound(pe.distance), rep.true_norms[i]);
      pe.eff_pair_m = effectivity(pair_bound(pe.distance), rep.true_norms[j]);
      if (pe.alpha_deg >= pe.beta_deg / 3.0) ok_beta3++;
      rep.pairs.push_back(pe);
    }
  }
  rep.alpha_beta3_fraction =
      rep.pairs.empty() ? 0.0 : double(ok_beta3) / double(rep.pairs.size());

  for (size_t i = 0; i < k; ++i) {
    SolutionEstimates se;
    se.id = ids[i];
    se.true_norm = rep.true_norms[i];
    se.truncation_norm = l2_norm(truncations[i]);
    se.dk_max_bound = dk_max(rep.distances, static_cast<int>(i));
    se.eff_dk_max = effectivity(se.dk_max_bound, se.true_norm);
    se.eff_width = effectivity(rep.width, se.true_norm);
    se.angle_bound_beta3 = 1e300;
    for (const auto& pe : rep.pairs) {
      if (pe.k == static_cast<int>(i) || pe.m == static_cast<int>(i)) {
        se.angle_bound_beta3 = std::min(se.angle_bound_beta3, pe.bound_beta3);
      }
    }
    se.eff_angle_beta3 = effectivity(se.angle_bound_beta3, se.true_norm);
    rep.estimates.push_back(se);
  }
  return rep;
}

}  // namespace everest
