#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "everest/gridvector.hpp"

using namespace everest;

namespace {

// Minimal 1x1-cell metadata carrier for synthetic vectors; hx = hy = 1 so
// the cell-area factor is 1 and norms equal plain Euclidean norms.
GridVector synthetic(std::vector<double> values) {
  GridVector v;
  v.grid = GridSpec{2, 2, 0.0, 0.0, 1.0, 1.0};
  v.margin = 0;
  v.variables = {0};
  v.values = std::move(values);
  return v;
}

ConservedField uniform_field(const GridSpec& g, double value) {
  ConservedField f(g, 1.4);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      f.set(i, j, {value, 0.0, 0.0, 2.5 * value});
    }
  }
  return f;
}

}  // namespace

TEST_CASE("error_vector: zero for identical fields, unit for one bump") {
  const GridSpec g{12, 10, 0.0, 0.0, 1.0, 1.0};
  ConservedField a = uniform_field(g, 1.0);
  ConservedField b = uniform_field(g, 1.0);

  const GridVector zero = error_vector(a, b, 3);
  CHECK(zero.size() == (12 - 6) * (10 - 6) * 4);
  for (double x : zero.values) CHECK(x == 0.0);

  // +1 density at one interior node, density-only selection.
  b.at(5, 5)[0] += 1.0;
  const GridVector one = error_vector(b, a, 3, {0});
  CHECK(one.size() == (12 - 6) * (10 - 6));
  double sum = 0.0, maxv = 0.0;
  for (double x : one.values) {
    sum += x;
    maxv = std::max(maxv, x);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(maxv == doctest::Approx(1.0).epsilon(1e-15));

  const GridSpec g2{12, 11, 0.0, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(error_vector(a, uniform_field(g2, 1.0), 3), GridMismatch);
}

TEST_CASE("error_vector applies per-variable normalization") {
  const GridSpec g{8, 8, 0.0, 0.0, 1.0, 1.0};
  ConservedField a = uniform_field(g, 1.0);
  ConservedField b = uniform_field(g, 1.0);
  b.at(4, 4)[3] += 2.0;
  const GridVector v = error_vector(b, a, 3, {3}, {1.0, 1.0, 1.0, 4.0});
  double sum = 0.0;
  for (double x : v.values) sum += x;
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("inner product and angles on synthetic vectors") {
  const GridVector e1 = synthetic({1.0, 0.0});
  const GridVector e2 = synthetic({0.0, 1.0});
  const GridVector d11 = synthetic({1.0, 1.0});

  CHECK(inner_product(e1, e1) == 1.0);
  CHECK(inner_product(e1, e2) == 0.0);
  CHECK(angle_between(e1, e2) == doctest::Approx(90.0).epsilon(1e-13));
  CHECK(angle_between(e1, d11) == doctest::Approx(45.0).epsilon(1e-13));
  CHECK(angle_between(e1, e1) == doctest::Approx(0.0));

  const GridVector neg = synthetic({-1.0, 0.0});
  CHECK(angle_between(e1, neg) == doctest::Approx(180.0).epsilon(1e-13));

  // Scale invariance for positive scaling.
  const GridVector scaled = synthetic({7.5, 0.0});
  CHECK(angle_between(scaled, d11) ==
        doctest::Approx(angle_between(e1, d11)).epsilon(1e-13));

  CHECK_THROWS_AS(angle_between(e1, synthetic({0.0, 0.0})), ZeroVector);
  GridVector other = e1;
  other.variables = {1};
  CHECK_THROWS_AS(inner_product(e1, other), MetadataMismatch);
  CHECK_THROWS_AS(angle_between(e1, synthetic({1.0, 0.0, 0.0})),
                  MetadataMismatch);
}

TEST_CASE("clamping keeps near-parallel vectors inside acos domain") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> base(32);
    for (double& x : base) x = u(rng);
    GridVector a = synthetic(base);
    for (double& x : base) x *= 3.0;  // exactly parallel up to rounding
    GridVector b = synthetic(base);
    const double ang = angle_between(a, b);
    CHECK(std::isfinite(ang));
    CHECK(ang >= 0.0);
    // acos amplifies an eps-level cosine error to sqrt(2 eps) radians.
    CHECK(ang < 1e-5);
  }
}

TEST_CASE("norms carry the cell-area factor") {
  GridVector v;
  v.grid = GridSpec{5, 5, 0.0, 0.0, 2.0, 2.0};  // hx = hy = 0.5
  v.margin = 1;
  v.variables = {0};
  v.values.assign(9, 2.0);
  // ||v||^2 = 9 * 4 * (0.5 * 0.5) = 9  ->  norm 3.
  CHECK(l2_norm(v) == doctest::Approx(3.0).epsilon(1e-14));

  GridVector w = v;
  w.values.assign(9, 0.0);
  CHECK(l2_distance(v, w) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("pairwise angle matrix and summary") {
  const GridVector e1 = synthetic({1.0, 0.0, 0.0});
  const GridVector e2 = synthetic({0.0, 1.0, 0.0});
  const GridVector e3 = synthetic({0.0, 0.0, 1.0});
  const auto m = pairwise_angles({e1, e2, e3});
  for (size_t i = 0; i < 3; ++i) {
    CHECK(m[i][i] == 0.0);
    for (size_t j = 0; j < 3; ++j) {
      CHECK(m[i][j] == m[j][i]);
      if (i != j) CHECK(m[i][j] == doctest::Approx(90.0).epsilon(1e-13));
    }
  }
  const AngleSummary s = angle_summary(m);
  CHECK(s.pairs == 3);
  CHECK(s.mean == doctest::Approx(90.0).epsilon(1e-13));
  CHECK(s.min == doctest::Approx(90.0).epsilon(1e-13));
  CHECK(s.max == doctest::Approx(90.0).epsilon(1e-13));

  // 13 members -> 78 distinct pairs.
  std::vector<GridVector> many;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 13; ++k) {
    std::vector<double> vals(40);
    for (double& x : vals) x = u(rng);
    many.push_back(synthetic(vals));
  }
  CHECK(angle_summary(pairwise_angles(many)).pairs == 78);

  CHECK_THROWS_AS(pairwise_angles({e1}), InvalidParams);
}

TEST_CASE("centered variant differs from uncentered on offset data") {
  const GridVector a = synthetic({2.0, 2.0, 2.0, 2.0});
  const GridVector b = synthetic({2.0, 2.0, 2.0, 2.1});
  const double plain = angle_between(a, b);
  CHECK(plain < 2.0);
  CHECK_THROWS_AS(angle_between(a, b, true), ZeroVector);  // a is constant

  const GridVector c = synthetic({1.0, 2.0, 3.0, 4.0});
  const GridVector d = synthetic({4.0, 3.0, 2.0, 1.0});
  CHECK(angle_between(c, d, true) == doctest::Approx(180.0).epsilon(1e-12));
  CHECK(angle_between(c, d) < 90.0);
}
