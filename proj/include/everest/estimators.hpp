#pragma once

#include <string>

#include "everest/gridvector.hpp"

namespace everest {

/// Pairwise L2 distances between solutions represented by their (shared
/// metadata) grid vectors: d_km = ||u^(k) - u^(m)||.
SquareMatrix distance_matrix(const std::vector<GridVector>& solutions);

/// Two-solution bound: the distance itself bounds either error norm when
/// the errors are near-orthogonal and of comparable size.
double pair_bound(double d12);

/// Hypercircle midpoint estimate: the half-sum solution's error norm equals
/// d12/2 exactly for orthogonal errors.
double hypercircle_estimate(double d12);

/// Max distance from solution k to any other member.
double dk_max(const SquareMatrix& distances, int k);

/// Ensemble width: max pairwise distance.
double ensemble_width(const SquareMatrix& distances);

/// Angle-driven bound d/(2 sin(a/2)) * (cos p + 2 sin p) at p = arctan 2,
/// which dominates the larger of the two error norms. exact_constant=false
/// uses the rounded coefficient 1.1 instead of sqrt(5)/2.
double angle_bound(double d12, double alpha_deg, bool exact_constant = true);

/// Conservative angle transfer from truncation to approximation errors.
double alpha_from_beta(double beta_deg);

/// Effectivity index: estimate / true.
double effectivity(double estimate_norm, double true_norm);

/// Largest triangle-inequality violation d_ik - (d_ij + d_jk) over all
/// index triples; <= tol for a consistent distance matrix.
double max_triangle_violation(const SquareMatrix& distances);

/// Pair-level outputs (k < m). Effectivities are validation-mode numbers:
/// they divide by true error norms, which need the exact solution.
struct PairEstimate {
  int k = 0;
  int m = 0;
  double distance = 0.0;
  double alpha_deg = 0.0;
  double beta_deg = 0.0;
  double bound_beta3 = 0.0;   // angle_bound(d, beta/3), the practical path
  double eff_beta3 = 0.0;     // bound_beta3 / max(true_k, true_m)
  double bound_direct = 0.0;  // angle_bound(d, measured alpha)
  double eff_direct = 0.0;
  double eff_pair_k = 0.0;    // d / true_k  (two-solution estimate)
  double eff_pair_m = 0.0;    // d / true_m
};

struct SolutionEstimates {
  std::string id;
  double true_norm = 0.0;
  double truncation_norm = 0.0;
  double dk_max_bound = 0.0;      // max distance to the other members
  double eff_dk_max = 0.0;        // dk_max_bound / true_norm
  double eff_width = 0.0;         // ensemble width / true_norm
  double angle_bound_beta3 = 0.0; // tightest beta/3 bound over partners
  double eff_angle_beta3 = 0.0;
};

struct EnsembleReport {
  std::vector<std::string> ids;
  SquareMatrix distances;
  SquareMatrix alpha;  // angles between approximation errors, degrees
  SquareMatrix beta;   // angles between truncation errors, degrees
  std::vector<double> true_norms;
  std::vector<SolutionEstimates> estimates;
  std::vector<PairEstimate> pairs;
  double width = 0.0;
  AngleSummary alpha_summary;
  AngleSummary beta_summary;
  double alpha_beta3_fraction = 0.0;  // share of pairs with alpha >= beta/3
};

/// Distance/angle/estimator assembly used by both the pipeline and tests.
/// solutions, errors and truncations are parallel arrays over the ensemble.
EnsembleReport analyze_ensemble(const std::vector<std::string>& ids,
                                const std::vector<GridVector>& solutions,
                                const std::vector<GridVector>& errors,
                                const std::vector<GridVector>& truncations);

}  // namespace everest
