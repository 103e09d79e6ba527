// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "awarp/error.hpp"
#include "awarp/geom.hpp"
#include "awarp/oracle.hpp"
#include "doctest.h"

using namespace awarp;

namespace {

const Triangle2 kUnit{{{{0, 0}, {1, 0}, {0, 1}}}};

bool contains_point(std::span<const Point2> pts, Point2 q, double tol) {
  return std::any_of(pts.begin(), pts.end(), [&](Point2 p) {
    return std::abs(p.x - q.x) <= tol && std::abs(p.y - q.y) <= tol;
  });
}

Triangle2 random_triangle(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Triangle2 t{{{{u(g), u(g)}, {u(g), u(g)}, {u(g), u(g)}}}};
    if (std::abs(signed_area(t)) > 1e-3) return t;
  }
}

}  // namespace

TEST_CASE("signed area") {
  CHECK(std::abs(signed_area(kUnit)) == 0.5);
  CHECK(signed_area(Triangle2{{{{0, 0}, {1, 1}, {2, 2}}}}) == 0.0);
  const Triangle2 t{{{{0, 0}, {1, 0}, {1, 1}}}};
  const Triangle2 r{{t.v[2], t.v[1], t.v[0]}};
  CHECK(signed_area(t) == -signed_area(r));
  CHECK(signed_area(t) > 0.0);
}

TEST_CASE("barycentric coordinates") {
  SUBCASE("vertex gives two zeros") {
    const BaryTriple b = barycentric(kUnit, kUnit.v[0]);
    CHECK(b[0] == doctest::Approx(1.0));
    CHECK(b[1] == 0.0);
    CHECK(b[2] == 0.0);
  }
  SUBCASE("centroid") {
    const BaryTriple b = barycentric(kUnit, {1.0 / 3, 1.0 / 3});
    for (int k = 0; k < 3; ++k) CHECK(b[k] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  }
  SUBCASE("interior point") {
    const BaryTriple b = barycentric(kUnit, {0.25, 0.25});
    CHECK(b[0] == doctest::Approx(0.5));
    CHECK(b[1] == doctest::Approx(0.25));
    CHECK(b[2] == doctest::Approx(0.25));
    CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("degenerate reference") {
    CHECK_THROWS_AS(barycentric(Triangle2{{{{0, 0}, {1, 1}, {2, 2}}}}, {0, 0}), Error);
  }
}

TEST_CASE("bary_to_point inverts barycentric") {
  CHECK(bary_to_point(kUnit, BaryTriple{{1, 0, 0}}) == kUnit.v[0]);
  const Point2 c = bary_to_point(kUnit, BaryTriple{{1.0 / 3, 1.0 / 3, 1.0 / 3}});
  CHECK(c.x == doctest::Approx(1.0 / 3));
  CHECK(c.y == doctest::Approx(1.0 / 3));

  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const Triangle2 t = random_triangle(g);
    double a = u(g);
    double b = u(g);
    if (a + b > 1) a = 1 - a, b = 1 - b;
    const Point2 p{t.v[0].x + a * (t.v[1].x - t.v[0].x) + b * (t.v[2].x - t.v[0].x),
                   t.v[0].y + a * (t.v[1].y - t.v[0].y) + b * (t.v[2].y - t.v[0].y)};
    const BaryTriple bt = barycentric(t, p);
    CHECK(bt.sum() == doctest::Approx(2 * std::abs(signed_area(t))).epsilon(1e-12));
    const Point2 q = bary_to_point(t, bt);
    CHECK(std::abs(q.x - p.x) <= 1e-13);
    CHECK(std::abs(q.y - p.y) <= 1e-13);
  }
}

TEST_CASE("side crossing") {
  SUBCASE("k component vanishes") {
    const BaryTriple c = side_crossing(BaryTriple{{-1, 0.7, 1.3}}, BaryTriple{{1, 0.2, -0.2}}, 0);
    CHECK(c[0] == 0.0);
  }
  SUBCASE("symmetric endpoints give the midpoint") {
    const BaryTriple c = side_crossing(BaryTriple{{0.4, -0.3, 0.9}}, BaryTriple{{0.4, 0.3, 0.9}}, 1);
    CHECK(c[0] == doctest::Approx(0.4));
    CHECK(c[1] == 0.0);
    CHECK(c[2] == doctest::Approx(0.9));
  }
  SUBCASE("same sign throws") {
    CHECK_THROWS_AS(side_crossing(BaryTriple{{1, 0, 0}}, BaryTriple{{2, 0, 0}}, 0), Error);
    CHECK_THROWS_AS(side_crossing(BaryTriple{{0, 1, 0}}, BaryTriple{{-2, 0, 0}}, 0), Error);
  }
  SUBCASE("agrees with Cartesian line intersection") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    int checked = 0;
    while (checked < 500) {
      const Point2 p{u(g), u(g)};
      const Point2 q{u(g), u(g)};
      const BaryTriple bp = barycentric(kUnit, p);
      const BaryTriple bq = barycentric(kUnit, q);
      for (std::size_t k = 0; k < 3; ++k) {
        if (!((bp[k] < 0 && bq[k] > 0) || (bp[k] > 0 && bq[k] < 0))) continue;
        // Side k is opposite vertex k.
        const Point2 a = kUnit.v[(k + 1) % 3];
        const Point2 b = kUnit.v[(k + 2) % 3];
        const double d = (q.x - p.x) * (b.y - a.y) - (q.y - p.y) * (b.x - a.x);
        const double s = ((a.x - p.x) * (b.y - a.y) - (a.y - p.y) * (b.x - a.x)) / d;
        const Point2 want{p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)};
        const Point2 got = bary_to_point(kUnit, side_crossing(bp, bq, k));
        CHECK(std::abs(got.x - want.x) <= 1e-12);
        CHECK(std::abs(got.y - want.y) <= 1e-12);
        ++checked;
      }
    }
  }
}

TEST_CASE("intersection vertices") {
  SUBCASE("self intersection") {
    const ConvexPolygon p = intersection_vertices(kUnit, kUnit);
    CHECK(p.size() == 3);
    for (const Point2& v : kUnit.v) CHECK(contains_point(p.vertices(), v, 0.0));
  }
  SUBCASE("disjoint") {
    const Triangle2 far{{{{5, 5}, {6, 5}, {5, 6}}}};
    CHECK(intersection_vertices(kUnit, far).size() == 0);
  }
  SUBCASE("shared side with a diagonal crossing") {
    const Triangle2 t1{{{{0, 0}, {1, 0}, {1, 1}}}};
    const ConvexPolygon p = intersection_vertices(t1, kUnit);
    CHECK(p.size() == 3);
    CHECK(contains_point(p.vertices(), {0, 0}, 1e-15));
    CHECK(contains_point(p.vertices(), {1, 0}, 1e-15));
    CHECK(contains_point(p.vertices(), {0.5, 0.5}, 1e-15));
  }
}

TEST_CASE("convex polygon area") {
  const std::vector<Point2> square{{1, 1}, {0, 0}, {0, 1}, {1, 0}};
  CHECK(convex_polygon_area(square) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<Point2> two{{0, 0}, {1, 1}};
  CHECK(convex_polygon_area(two) == 0.0);

  std::vector<Point2> hex;
  for (int k : {3, 0, 5, 1, 4, 2}) {
    const double a = k * std::numbers::pi / 3;
    hex.push_back({std::cos(a), std::sin(a)});
  }
  CHECK(std::abs(convex_polygon_area(hex) - 3 * std::sqrt(3.0) / 2) <= 1e-12);

  std::mt19937_64 g(3);
  std::vector<Point2> perm = hex;
  for (int n = 0; n < 20; ++n) {
    std::shuffle(perm.begin(), perm.end(), g);
    CHECK(std::abs(convex_polygon_area(perm) - convex_polygon_area(hex)) <= 1e-14);
  }
}

TEST_CASE("triangle intersection area") {
  CHECK(triangle_intersection_area(kUnit, kUnit) == doctest::Approx(0.5).epsilon(1e-15));
  const Triangle2 lower{{{{0, 0}, {1, 0}, {1, 1}}}};
  const Triangle2 upper{{{{0, 0}, {1, 1}, {0, 1}}}};
  CHECK(triangle_intersection_area(lower, upper) <= 1e-15);
  CHECK(triangle_intersection_area(lower, kUnit) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(triangle_intersection_area(Triangle2{{{{0, 0}, {1, 1}, {2, 2}}}}, kUnit), Error);
}

TEST_CASE("intersection area properties on random pairs") {
  std::mt19937_64 g(99);
  std::uniform_real_distribution<double> ang(0.0, 2 * std::numbers::pi);
  std::uniform_real_distribution<double> off(-3.0, 3.0);
  for (int n = 0; n < 2000; ++n) {
    const Triangle2 a = random_triangle(g);
    const Triangle2 b = random_triangle(g);
    const double ab = triangle_intersection_area(a, b);
    const double ba = triangle_intersection_area(b, a);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(ab >= 0.0);
    CHECK(ab <= std::min(std::abs(signed_area(a)), std::abs(signed_area(b))) + 1e-12);
    CHECK(std::abs(ab - oracle::clip_oracle_area(a, b)) <=
          1e-10 * std::max(std::abs(signed_area(a)), std::abs(signed_area(b))));

    const double th = ang(g);
    const double c = std::cos(th);
    const double s = std::sin(th);
    const Point2 o{off(g), off(g)};
    auto move = [&](Triangle2 t) {
      for (Point2& p : t.v) p = {c * p.x - s * p.y + o.x, s * p.x + c * p.y + o.y};
      return t;
    };
    const double moved = triangle_intersection_area(move(a), move(b));
    CHECK(std::abs(moved - ab) <= 1e-10 * std::max(ab, 1e-3));
  }
}

TEST_CASE("oracles") {
  const Triangle2 far{{{{5, 5}, {6, 5}, {5, 6}}}};
  CHECK(oracle::clip_oracle_area(kUnit, kUnit) == doctest::Approx(0.5));
  CHECK(oracle::clip_oracle_area(kUnit, far) == 0.0);
  CHECK(oracle::mc_oracle_area(kUnit, far, 10000, 1).estimate == 0.0);
  const oracle::McEstimate self = oracle::mc_oracle_area(kUnit, kUnit, 1000000, 2);
  CHECK(std::abs(self.estimate - 0.5) <= 4 * self.stderr_);
  const oracle::McEstimate again = oracle::mc_oracle_area(kUnit, kUnit, 1000000, 2);
  CHECK(again.estimate == self.estimate);
}

TEST_CASE("corpora") {
  CHECK(oracle::topological_corpus().size() >= 17);
  CHECK(oracle::degenerate_corpus().size() >= 30);
  const auto r1 = oracle::random_corpus(50, 8);
  const auto r2 = oracle::random_corpus(50, 8);
  REQUIRE(r1.size() == 50);
  for (std::size_t k = 0; k < r1.size(); ++k) CHECK(r1[k].t1.v == r2[k].t1.v);
}

TEST_CASE("reduced selftest passes") {
  oracle::SelftestOptions o;
  o.random_pairs = 300;
  o.mc_samples = 100000;
  std::size_t seen = 0;
  const oracle::SelftestSummary s = oracle::run_selftest(o, [&](const oracle::CaseResult& r) {
    ++seen;
    CHECK_MESSAGE(r.passed(), r.group << " " << r.label);
  });
  CHECK(s.all_passed());
  CHECK(seen == s.topological_total + s.degenerate_total + s.random_total);
}
