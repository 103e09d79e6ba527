// SPDX-License-Identifier: Apache-2.0
#include "awarp/mapping.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "awarp/error.hpp"

namespace awarp {
namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void singular(const std::string& what) {
  throw Error(ErrorKind::Singular, what);
}

double sin_inverse_1d(double v) {
  if (!(v >= 0.0 && v <= 1.0)) singular("arcsin map: coordinate outside [0,1]");
  return 0.5 - std::asin(1.0 - 2.0 * v) / kPi;
}

double sin_inverse_jacobian(Point2 p) {
  const double q = p.x * (1.0 - p.x) * p.y * (1.0 - p.y);
  if (!(q > 0.0)) singular("sin map: inverse Jacobian singular on the domain edge");
  return 1.0 / (kPi * kPi * std::sqrt(q));
}

}  // namespace

double CoordinateMap::eval_inverse_jacobian(Point2 p) const {
  if (inverse_jacobian) return inverse_jacobian(p);
  if (!inverse || !jacobian) {
    throw Error(ErrorKind::InvalidArgument, name + ": no inverse Jacobian available");
  }
  const double j = jacobian(inverse(p));
  if (j == 0.0) singular(name + ": zero Jacobian");
  return 1.0 / j;
}

CoordinateMap map_identity() {
  CoordinateMap m;
  m.name = "identity";
  m.domain = {-1e300, -1e300, 1e300, 1e300};
  m.forward = [](Point2 p) { return p; };
  m.inverse = [](Point2 p) { return p; };
  m.jacobian = [](Point2) { return 1.0; };
  m.jacobian_gradient = [](Point2) { return Point2{0.0, 0.0}; };
  m.inverse_jacobian = [](Point2) { return 1.0; };
  return m;
}

CoordinateMap map_translate(double tx, double ty) {
  CoordinateMap m = map_identity();
  m.name = "translate";
  m.forward = [tx, ty](Point2 p) { return Point2{p.x + tx, p.y + ty}; };
  m.inverse = [tx, ty](Point2 p) { return Point2{p.x - tx, p.y - ty}; };
  return m;
}

CoordinateMap map_wavy() {
  CoordinateMap m;
  m.name = "wavy";
  m.forward = [](Point2 p) {
    return Point2{p.x + 3.0 * std::sin(2.0 * kPi * p.y) / 20.0,
                  p.y - 3.0 * std::sin(kPi * p.x) / 20.0};
  };
  // det [[1, 0.3 pi cos(2 pi y)], [-0.15 pi cos(pi x), 1]]
  m.jacobian = [](Point2 p) {
    return 1.0 + 0.045 * kPi * kPi * std::cos(2.0 * kPi * p.y) * std::cos(kPi * p.x);
  };
  m.jacobian_gradient = [](Point2 p) {
    const double k = 0.045 * kPi * kPi * kPi;
    return Point2{-k * std::cos(2.0 * kPi * p.y) * std::sin(kPi * p.x),
                  -2.0 * k * std::sin(2.0 * kPi * p.y) * std::cos(kPi * p.x)};
  };
  return m;
}

CoordinateMap map_perspective(double a, double b, double c, double d) {
  if (c == 0.0 || d == b) {
    throw Error(ErrorKind::InvalidArgument, "perspective: need c != 0 and d != b");
  }
  CoordinateMap m;
  m.name = "perspective";
  m.forward = [a, b, c, d](Point2 p) {
    if (p.y == b) singular("perspective: y == b");
    const double k = (d - b) / (p.y - b);
    return Point2{a + (p.x - a) * k, c * (1.0 + k)};
  };
  // Solving Y = c(1+k) for k gives k = (Y-c)/c.
  m.inverse = [a, b, c, d](Point2 q) {
    if (q.y == c) singular("perspective inverse: Y == c");
    const double s = c / (q.y - c);
    return Point2{a + (q.x - a) * s, b + (d - b) * s};
  };
  m.jacobian = [b, c, d](Point2 p) {
    if (p.y == b) singular("perspective: y == b");
    const double r = p.y - b;
    return -c * (d - b) * (d - b) / (r * r * r);
  };
  m.jacobian_gradient = [b, c, d](Point2 p) {
    if (p.y == b) singular("perspective: y == b");
    const double r = p.y - b;
    return Point2{0.0, 3.0 * c * (d - b) * (d - b) / (r * r * r * r)};
  };
  return m;
}

CoordinateMap map_sin() {
  CoordinateMap m;
  m.name = "sin";
  m.forward = [](Point2 p) {
    return Point2{(1.0 - std::cos(kPi * p.x)) / 2.0, (1.0 - std::cos(kPi * p.y)) / 2.0};
  };
  m.inverse = [](Point2 q) { return Point2{sin_inverse_1d(q.x), sin_inverse_1d(q.y)}; };
  m.jacobian = [](Point2 p) {
    return 0.25 * kPi * kPi * std::sin(kPi * p.x) * std::sin(kPi * p.y);
  };
  m.jacobian_gradient = [](Point2 p) {
    const double k = 0.25 * kPi * kPi * kPi;
    return Point2{k * std::cos(kPi * p.x) * std::sin(kPi * p.y),
                  k * std::sin(kPi * p.x) * std::cos(kPi * p.y)};
  };
  m.inverse_jacobian = sin_inverse_jacobian;
  return m;
}

CoordinateMap map_arcsin() {
  const CoordinateMap s = map_sin();
  CoordinateMap m;
  m.name = "arcsin";
  m.forward = s.inverse;
  m.inverse = s.forward;
  m.jacobian = sin_inverse_jacobian;
  m.inverse_jacobian = s.jacobian;
  return m;
}

CoordinateMap map_from_grid(const GridFrame& frame, std::span<const double> nodes_x,
                            std::span<const double> nodes_y) {
  frame.validate();
  const auto cols = static_cast<std::size_t>(frame.nx + 1);
  const auto rows = static_cast<std::size_t>(frame.ny + 1);
  if (nodes_x.size() != cols * rows || nodes_y.size() != cols * rows) {
    throw Error(ErrorKind::InvalidArgument,
                "grid map: node arrays must be (nx+1) x (ny+1)");
  }
  auto nx = std::make_shared<const std::vector<double>>(nodes_x.begin(), nodes_x.end());
  auto ny = std::make_shared<const std::vector<double>>(nodes_y.begin(), nodes_y.end());

  CoordinateMap m;
  m.name = "grid";
  m.domain = {frame.x0, frame.y0, frame.x_end(), frame.y_end()};
  m.forward = [frame, cols, nx, ny](Point2 p) {
    // Fractional node coordinates snap to integers so corners are exact.
    auto locate = [](double v, double origin, double step, std::int64_t n,
                     std::int64_t& cell) {
      double t = (v - origin) / step;
      const double r = std::nearbyint(t);
      if (std::abs(t - r) <= 1e-9) t = r;
      if (!(t >= 0.0 && t <= static_cast<double>(n))) singular("grid map: point outside node grid");
      cell = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(t)), n - 1);
      return t - static_cast<double>(cell);
    };
    std::int64_t i = 0;
    std::int64_t j = 0;
    const double u = locate(p.x, frame.x0, frame.dx, frame.nx, i);
    const double v = locate(p.y, frame.y0, frame.dy, frame.ny, j);
    const std::size_t k00 = static_cast<std::size_t>(j) * cols + static_cast<std::size_t>(i);
    const std::size_t k01 = k00 + cols;
    auto lerp2 = [&](const std::vector<double>& n) {
      return (1.0 - u) * (1.0 - v) * n[k00] + u * (1.0 - v) * n[k00 + 1] +
             (1.0 - u) * v * n[k01] + u * v * n[k01 + 1];
    };
    return Point2{lerp2(*nx), lerp2(*ny)};
  };
  return m;
}

double numeric_jacobian(const CoordinateMap& map, Point2 p, double h) {
  const Box& d = map.domain;
  if (!(h > 0.0) || p.x - h < d.xmin || p.x + h > d.xmax || p.y - h < d.ymin ||
      p.y + h > d.ymax) {
    throw Error(ErrorKind::OutOfRange, "numeric_jacobian: stencil leaves the domain");
  }
  const Point2 xp = map.forward({p.x + h, p.y});
  const Point2 xm = map.forward({p.x - h, p.y});
  const Point2 yp = map.forward({p.x, p.y + h});
  const Point2 ym = map.forward({p.x, p.y - h});
  const double dXdx = (xp.x - xm.x) / (2.0 * h);
  const double dYdx = (xp.y - xm.y) / (2.0 * h);
  const double dXdy = (yp.x - ym.x) / (2.0 * h);
  const double dYdy = (yp.y - ym.y) / (2.0 * h);
  return dXdx * dYdy - dXdy * dYdx;
}

Point2 numeric_jacobian_gradient(const CoordinateMap& map, Point2 p, double h) {
  const Box& d = map.domain;
  if (!(h > 0.0) || p.x - h < d.xmin || p.x + h > d.xmax || p.y - h < d.ymin ||
      p.y + h > d.ymax) {
    throw Error(ErrorKind::OutOfRange,
                "numeric_jacobian_gradient: stencil leaves the domain");
  }
  // Without an analytic Jacobian the stencil reaches 2h from p.
  auto jac = [&map, h](Point2 q) {
    return map.jacobian ? map.jacobian(q) : numeric_jacobian(map, q, h);
  };
  const double dx = (jac({p.x + h, p.y}) - jac({p.x - h, p.y})) / (2.0 * h);
  const double dy = (jac({p.x, p.y + h}) - jac({p.x, p.y - h})) / (2.0 * h);
  return {dx, dy};
}

}  // namespace awarp
