#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "everest/errors.hpp"
#include "everest/estimators.hpp"

using namespace everest;

namespace {

GridVector synthetic(std::vector<double> values) {
  GridVector v;
  v.grid = GridSpec{2, 2, 0.0, 0.0, 1.0, 1.0};  // hx = hy = 1
  v.margin = 0;
  v.variables = {0};
  v.values = std::move(values);
  return v;
}

}  // namespace

TEST_CASE("distance matrix on synthetic solutions") {
  const auto a = synthetic({1.0, 2.0, 3.0});
  const auto b = synthetic({1.0, 2.0, 4.0});
  const auto c = synthetic({4.0, 6.0, 3.0});

  const auto zero = distance_matrix({a, a});
  CHECK(zero[0][1] == 0.0);

  const auto m = distance_matrix({a, b, c});
  CHECK(m[0][1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m[0][2] == doctest::Approx(5.0).epsilon(1e-14));  // 3-4-5
  CHECK(m[1][2] == doctest::Approx(std::sqrt(9.0 + 16.0 + 1.0)).epsilon(1e-14));
  for (int i = 0; i < 3; ++i) {
    CHECK(m[i][i] == 0.0);
    for (int j = 0; j < 3; ++j) CHECK(m[i][j] == m[j][i]);
  }
  CHECK(max_triangle_violation(m) <= 1e-12);
}

TEST_CASE("triangle inequality on random ensembles") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<GridVector> vs;
    for (int k = 0; k < 6; ++k) {
      std::vector<double> vals(50);
      for (double& x : vals) x = u(rng);
      vs.push_back(synthetic(vals));
    }
    CHECK(max_triangle_violation(distance_matrix(vs)) <= 1e-12);
  }
}

TEST_CASE("dk_max and ensemble width") {
  SquareMatrix d = {{0.0, 1.0, 3.0, 2.0},
                    {1.0, 0.0, 2.5, 1.5},
                    {3.0, 2.5, 0.0, 0.5},
                    {2.0, 1.5, 0.5, 0.0}};
  CHECK(dk_max(d, 0) == 3.0);
  CHECK(dk_max(d, 3) == 2.0);
  CHECK(ensemble_width(d) == 3.0);
  for (int k = 0; k < 4; ++k) {
    for (int m = 0; m < 4; ++m) CHECK(dk_max(d, k) >= d[k][m]);
    CHECK(ensemble_width(d) >= dk_max(d, k));
  }
}

TEST_CASE("pair bound: Pythagoras holds, parallel counterexample fails") {
  // Orthogonal equal-norm errors: d = r sqrt(2) >= r.
  const double r = 1.7;
  const double d_orth = std::hypot(r, r);
  CHECK(pair_bound(d_orth) >= r);
  // Parallel errors with norms 1 and 3: d = 2 < 3, bound violated.
  CHECK(pair_bound(3.0 - 1.0) < 3.0);
}

TEST_CASE("hypercircle: exact on constructed orthogonal pairs") {
  // Textbook planar case.
  CHECK(hypercircle_estimate(std::sqrt(2.0)) ==
        doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));

  // Random orthogonal pairs with unequal norms in R^20: the midpoint error
  // equals d/2 exactly.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> e1(20), e2(20);
    for (double& x : e1) x = u(rng);
    for (double& x : e2) x = u(rng);
    // Gram-Schmidt: make e2 orthogonal to e1.
    double dot = 0.0, n1 = 0.0;
    for (int i = 0; i < 20; ++i) {
      dot += e1[i] * e2[i];
      n1 += e1[i] * e1[i];
    }
    for (int i = 0; i < 20; ++i) e2[i] -= dot / n1 * e1[i];
    for (double& x : e2) x *= 3.17;  // unequal norms

    double mid2 = 0.0, d2 = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double m = 0.5 * (e1[i] + e2[i]);
      const double d = e1[i] - e2[i];
      mid2 += m * m;
      d2 += d * d;
    }
    CHECK(std::sqrt(mid2) ==
          doctest::Approx(hypercircle_estimate(std::sqrt(d2))).epsilon(1e-12));
  }

  // Parallel equal errors: midpoint error r, yet d/2 = 0.
  CHECK(hypercircle_estimate(0.0) == 0.0);
}

TEST_CASE("angle bound values and monotonicity") {
  CHECK(angle_bound(1.0, 180.0) ==
        doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-14));
  CHECK(angle_bound(1.0, 180.0, false) == doctest::Approx(1.1).epsilon(1e-14));
  CHECK(angle_bound(1.0, 60.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));

  double prev = 1e300;
  for (double a = 5.0; a <= 180.0; a += 5.0) {
    const double b = angle_bound(2.0, a);
    CHECK(b < prev);
    prev = b;
  }
  CHECK_THROWS_AS(angle_bound(1.0, 0.0), DegenerateAngle);
  CHECK_THROWS_AS(angle_bound(1.0, -10.0), DegenerateAngle);
  CHECK_THROWS_AS(angle_bound(1.0, 181.0), DegenerateAngle);
}

TEST_CASE("angle bound dominates the larger error over random planar pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ur(1e-3, 10.0);
  std::uniform_real_distribution<double> ua(0.5, 180.0);
  int checked = 0;
  for (int it = 0; it < 100000; ++it) {
    double r1 = ur(rng), r2 = ur(rng);
    if (r1 > r2) std::swap(r1, r2);
    const double alpha = ua(rng);
    const double arad = alpha * std::numbers::pi / 180.0;
    const double d = std::sqrt(r1 * r1 + r2 * r2 -
                               2.0 * r1 * r2 * std::cos(arad));
    const double bound = angle_bound(d, alpha);
    if (bound < r2) {
      CHECK_MESSAGE(false, "violation at r1=", r1, " r2=", r2, " a=", alpha);
    }
    checked++;
  }
  CHECK(checked == 100000);
}

TEST_CASE("alpha from beta and effectivity") {
  CHECK(alpha_from_beta(60.0) == doctest::Approx(20.0));
  CHECK(alpha_from_beta(180.0) == doctest::Approx(60.0));
  CHECK_THROWS_AS(alpha_from_beta(0.0), DegenerateAngle);

  CHECK(effectivity(1.5, 1.0) == doctest::Approx(1.5));
  CHECK(effectivity(2.0, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(effectivity(1.0, 0.0), ZeroTrueError);
}

TEST_CASE("analyze_ensemble wires distances, angles and estimates together") {
  // Exact solution zero, so solutions equal their errors.
  const auto d1 = synthetic({1.0, 0.0, 0.0, 0.0});
  const auto d2 = synthetic({0.0, 2.0, 0.0, 0.0});
  const auto d3 = synthetic({1.0, 1.0, 1.0, 0.0});
  const auto t1 = synthetic({1.0, 0.0, 0.0, 0.0});
  const auto t2 = synthetic({1.0, 1.0, 0.0, 0.0});
  const auto t3 = synthetic({0.0, 0.0, 1.0, 1.0});

  const auto rep = analyze_ensemble({"s1", "s2", "s3"}, {d1, d2, d3},
                                    {d1, d2, d3}, {t1, t2, t3});
  CHECK(rep.pairs.size() == 3);
  CHECK(rep.true_norms[0] == doctest::Approx(1.0));
  CHECK(rep.true_norms[1] == doctest::Approx(2.0));
  CHECK(rep.true_norms[2] == doctest::Approx(std::sqrt(3.0)));
  CHECK(rep.distances[0][1] == doctest::Approx(std::sqrt(5.0)));
  CHECK(rep.alpha[0][1] == doctest::Approx(90.0));
  CHECK(rep.beta[0][1] == doctest::Approx(45.0));
  CHECK(rep.beta[0][2] == doctest::Approx(90.0));
  CHECK(rep.width == doctest::Approx(ensemble_width(rep.distances)));

  for (size_t k = 0; k < 3; ++k) {
    const auto& se = rep.estimates[k];
    CHECK(se.true_norm == doctest::Approx(rep.true_norms[k]));
    CHECK(se.dk_max_bound ==
          doctest::Approx(dk_max(rep.distances, static_cast<int>(k))));
    CHECK(se.eff_dk_max ==
          doctest::Approx(se.dk_max_bound / se.true_norm));
    CHECK(se.eff_width >= se.eff_dk_max);
  }
  for (const auto& pe : rep.pairs) {
    const double larger = std::max(rep.true_norms[pe.k], rep.true_norms[pe.m]);
    CHECK(pe.bound_beta3 ==
          doctest::Approx(angle_bound(pe.distance,
                                      alpha_from_beta(pe.beta_deg))));
    CHECK(pe.eff_beta3 == doctest::Approx(pe.bound_beta3 / larger));
    CHECK(pe.bound_direct >= larger * (1.0 - 1e-12));
  }
  CHECK(rep.alpha_beta3_fraction == doctest::Approx(1.0));

  CHECK_THROWS_AS(analyze_ensemble({"one"}, {d1}, {d1}, {t1}), InvalidParams);
}
