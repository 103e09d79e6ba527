// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "awarp/geom.hpp"
#include "awarp/raster.hpp"

namespace awarp {

/// Coordinate transformation (x, y) -> (X, Y). Only `forward` is mandatory.
/// Evaluations that hit a singularity throw Error(Singular).
struct CoordinateMap {
  std::string name;
  Box domain{0.0, 0.0, 1.0, 1.0};

  std::function<Point2(Point2)> forward;
  std::function<Point2(Point2)> inverse;
  /// det(df/dx) at a source point.
  std::function<double(Point2)> jacobian;
  /// Gradient of `jacobian` at a source point.
  std::function<Point2(Point2)> jacobian_gradient;
  /// Jacobian of the inverse map at a destination point, i.e. 1/J_f there.
  std::function<double(Point2)> inverse_jacobian;

  bool has_inverse() const { return static_cast<bool>(inverse); }
  bool has_jacobian() const { return static_cast<bool>(jacobian); }
  bool has_inverse_jacobian() const {
    return static_cast<bool>(inverse_jacobian) || (inverse && jacobian);
  }
  /// inverse_jacobian if given, else 1/jacobian(inverse(p)).
  double eval_inverse_jacobian(Point2 p) const;
};

CoordinateMap map_identity();
CoordinateMap map_translate(double tx, double ty);

/// X = x + 3 sin(2 pi y)/20, Y = y - 3 sin(pi x)/20. No inverse.
CoordinateMap map_wavy();

/// Projection of the xy plane onto the vertical plane y = d from the
/// viewpoint (a, b, c). Orientation reversing; singular at y = b.
CoordinateMap map_perspective(double a = 0.25, double b = -0.1, double c = 0.5,
                              double d = 0.0);

/// X = (1 - cos(pi x))/2, same for Y; inverse via arcsin.
CoordinateMap map_sin();
/// The inverse of map_sin as a map in its own right.
CoordinateMap map_arcsin();

/// Node arrays of size (nx+1) x (ny+1), row-major, holding (X, Y) at every
/// pixel corner of `frame`. Exact at corners, bilinear in between.
CoordinateMap map_from_grid(const GridFrame& frame, std::span<const double> nodes_x,
                            std::span<const double> nodes_y);

/// Central-difference Jacobian determinant. The stencil must stay inside
/// map.domain, else Error(OutOfRange).
double numeric_jacobian(const CoordinateMap& map, Point2 p, double h);

/// Central differences of map.jacobian when present, of numeric_jacobian
/// otherwise.
Point2 numeric_jacobian_gradient(const CoordinateMap& map, Point2 p, double h);

/// Parses `name(k=v,...)`: identity(), translate(x=,y=), wavy(),
/// perspective(a=,b=,c=,d=), sin(), arcsin(), grid(x=<file>,y=<file>).
/// Unknown names or keys throw Error(InvalidArgument); unreadable node files
/// throw Error(Io) / Error(Format).
CoordinateMap parse_map_spec(std::string_view spec);

}  // namespace awarp
