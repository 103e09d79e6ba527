// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "awarp/error.hpp"
#include "awarp/mapping.hpp"
#include "doctest.h"

using namespace awarp;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

bool near(Point2 a, Point2 b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol;
}

std::vector<Point2> interior_points(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point2> pts(n);
  for (Point2& p : pts) p = {u(g), u(g)};
  return pts;
}

}  // namespace

TEST_CASE("wavy map") {
  const CoordinateMap m = map_wavy();
  CHECK(near(m.forward({0, 0}), {0, 0}, 1e-15));
  CHECK(near(m.forward({1, 1}), {1, 1}, 1e-15));
  CHECK(near(m.forward({0.5, 0.25}), {0.65, 0.10}, 1e-15));
  CHECK_FALSE(m.has_inverse());
  for (int a = 0; a < 100; ++a) {
    for (int b = 0; b < 100; ++b) {
      const double j = m.jacobian({(a + 0.5) / 100, (b + 0.5) / 100});
      CHECK((j > 0.45 && j < 1.65));
    }
  }
}

TEST_CASE("perspective map") {
  const CoordinateMap m = map_perspective();
  for (const Point2& q : interior_points(1000, 3, 0.0, 1.0)) {
    CHECK(near(m.forward(m.inverse(q)), q, 1e-12));
  }
  for (const Point2& p : interior_points(1000, 4, 0.0, 1.0)) {
    CHECK(near(m.inverse(m.forward(p)), p, 1e-12));
  }
  double lo = 1e300;
  double hi = -1e300;
  for (int a = 0; a < 200; ++a) {
    for (int b = 0; b < 200; ++b) {
      const double j = m.jacobian({(a + 0.5) / 200, (b + 0.5) / 200});
      lo = std::min(lo, j);
      hi = std::max(hi, j);
    }
  }
  CHECK(lo > -5.0);
  CHECK(hi < -5.0 / 1331.0);
  CHECK_THROWS_AS(m.forward({0.3, -0.1}), Error);
}

TEST_CASE("sin and arcsin maps") {
  const CoordinateMap s = map_sin();
  const CoordinateMap a = map_arcsin();
  CHECK(near(s.forward({0.5, 0.5}), {0.5, 0.5}, 1e-15));
  CHECK(s.jacobian({0.5, 0.5}) == doctest::Approx(kPi * kPi / 4).epsilon(1e-15));
  CHECK(near(s.forward({0, 0}), {0, 0}, 0.0));
  CHECK(near(s.forward({1, 1}), {1, 1}, 0.0));
  CHECK(s.forward({0, 0.3}).x == 0.0);
  for (const Point2& p : interior_points(1000, 5, 1e-3, 1 - 1e-3)) {
    CHECK(near(s.inverse(s.forward(p)), p, 1e-12));
    CHECK(near(s.forward(a.forward(p)), p, 1e-12));
    CHECK(s.eval_inverse_jacobian(s.forward(p)) * s.jacobian(p) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(s.eval_inverse_jacobian({0.0, 0.5}), Error);
  CHECK_THROWS_AS(s.eval_inverse_jacobian({0.5, 1.0}), Error);

  const Point2 g = s.jacobian_gradient({0.25, 0.5});
  CHECK(std::hypot(g.x, g.y) == doctest::Approx(std::pow(kPi, 3) * std::sqrt(2.0) / 8));
  CHECK(std::hypot(g.x, g.y) == doctest::Approx(5.480).epsilon(1e-3));
  const Point2 c = s.jacobian_gradient({0.5, 0.5});
  CHECK(std::hypot(c.x, c.y) <= 1e-15);
}

TEST_CASE("analytic and numeric Jacobians agree") {
  for (const CoordinateMap& m : {map_wavy(), map_perspective(), map_sin(), map_identity()}) {
    for (const Point2& p : interior_points(1000, 6, 0.01, 0.99)) {
      const double j = m.jacobian(p);
      CHECK(std::abs(j - numeric_jacobian(m, p, 1e-5)) <= 1e-7 * std::max(1.0, std::abs(j)));
    }
  }
  const CoordinateMap s = map_sin();
  CHECK(std::abs(numeric_jacobian(s, {0.3, 0.7}, 1e-5) - s.jacobian({0.3, 0.7})) <= 1e-8);
  for (const Point2& p : interior_points(200, 7, 0.05, 0.95)) {
    const Point2 a = s.jacobian_gradient(p);
    CoordinateMap bare = s;
    bare.jacobian_gradient = nullptr;
    const Point2 n = numeric_jacobian_gradient(bare, p, 1e-5);
    CHECK(std::abs(a.x - n.x) <= 1e-6);
    CHECK(std::abs(a.y - n.y) <= 1e-6);
  }
}

TEST_CASE("numeric jacobian basics") {
  CHECK(numeric_jacobian(map_identity(), {0.5, 0.5}, 1e-3) == doctest::Approx(1.0));
  CoordinateMap lin;
  lin.forward = [](Point2 p) { return Point2{2 * p.x, 3 * p.y}; };
  CHECK(numeric_jacobian(lin, {0.5, 0.5}, 1e-3) == doctest::Approx(6.0));
  CHECK_THROWS_AS(numeric_jacobian(lin, {0.0, 0.5}, 1e-3), Error);
}

TEST_CASE("grid maps") {
  const GridFrame f = GridFrame::unit(8, 6);
  const std::size_t n = 9 * 7;
  std::vector<double> xs(n);
  std::vector<double> ys(n);
  auto fill = [&](const CoordinateMap& m) {
    for (std::int64_t j = 0; j <= f.ny; ++j) {
      for (std::int64_t i = 0; i <= f.nx; ++i) {
        const Point2 q = m.forward({f.edge_x(i), f.edge_y(j)});
        xs[static_cast<std::size_t>(j * 9 + i)] = q.x;
        ys[static_cast<std::size_t>(j * 9 + i)] = q.y;
      }
    }
  };
  SUBCASE("identity nodes") {
    fill(map_identity());
    const CoordinateMap g = map_from_grid(f, xs, ys);
    for (const Point2& p : interior_points(100, 8, 0.0, 1.0)) CHECK(near(g.forward(p), p, 1e-15));
  }
  SUBCASE("translated nodes") {
    fill(map_translate(0.3, -0.2));
    const CoordinateMap g = map_from_grid(f, xs, ys);
    CHECK(near(g.forward({0.41, 0.77}), {0.71, 0.57}, 1e-15));
  }
  SUBCASE("sampled sin map") {
    const CoordinateMap s = map_sin();
    fill(s);
    const CoordinateMap g = map_from_grid(f, xs, ys);
    for (std::int64_t j = 0; j <= f.ny; ++j) {
      for (std::int64_t i = 0; i <= f.nx; ++i) {
        const Point2 p{f.edge_x(i), f.edge_y(j)};
        CHECK(g.forward(p) == s.forward(p));
      }
    }
    const Point2 mid{f.center_x(3), f.center_y(2)};
    CHECK(near(g.forward(mid), s.forward(mid), 2.0 * f.dx * f.dx));
  }
  SUBCASE("size mismatch") {
    xs.pop_back();
    CHECK_THROWS_AS(map_from_grid(f, xs, ys), Error);
  }
}

TEST_CASE("map spec parsing") {
  CHECK(parse_map_spec("wavy()").name == map_wavy().name);
  const CoordinateMap p = parse_map_spec(" perspective(a=0.25, b=-0.1,c=0.5,d=0) ");
  CHECK(near(p.forward({0.3, 0.4}), map_perspective().forward({0.3, 0.4}), 0.0));
  const CoordinateMap t = parse_map_spec("translate(x=0.5,y=-1)");
  CHECK(near(t.forward({0, 0}), {0.5, -1}, 0.0));
  auto kind_of = [](const char* spec) {
    try {
      (void)parse_map_spec(spec);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Degenerate;
  };
  CHECK(kind_of("wavy") == ErrorKind::InvalidArgument);
  CHECK(kind_of("nosuch()") == ErrorKind::InvalidArgument);
  CHECK(kind_of("sin(q=1)") == ErrorKind::InvalidArgument);
  CHECK(kind_of("perspective(a=x)") == ErrorKind::InvalidArgument);
  CHECK(kind_of("translate(x=1,x=2)") == ErrorKind::InvalidArgument);
  CHECK(kind_of("grid(x=/nonexistent/a.awf,y=/nonexistent/b.awf)") == ErrorKind::Io);
}
