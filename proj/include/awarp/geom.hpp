// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace awarp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Triangle2 {
  std::array<Point2, 3> v;
};

/// Unscaled barycentric coordinates. Components sum to twice the absolute
/// area of the reference triangle; all non-negative iff the point is inside
/// or on the boundary.
struct BaryTriple {
  std::array<double, 3> b{};

  double operator[](std::size_t k) const { return b[k]; }
  double& operator[](std::size_t k) { return b[k]; }
  double sum() const { return b[0] + b[1] + b[2]; }
};

/// Candidate/pruned vertex set of a triangle-triangle intersection.
struct ConvexPolygon {
  // 3 + 3 + 6 in exact arithmetic; tolerance bands near vertices can admit a
  // few more crossings before merging.
  static constexpr std::size_t kCapacity = 16;

  std::array<Point2, kCapacity> pts{};
  std::size_t n = 0;

  void push(Point2 p) { pts[n++] = p; }
  std::span<const Point2> vertices() const { return {pts.data(), n}; }
  std::size_t size() const { return n; }
};

/// Half of the cross product (v-w)x(u-w); positive for counter-clockwise
/// vertex order in a y-up frame.
double signed_area(const Triangle2& t);

/// Largest vertex-to-vertex distance.
double diameter(const Triangle2& t);

/// |A| <= 1e-14 * diameter^2.
bool is_degenerate(const Triangle2& t);

// Throws Error(Degenerate) for a degenerate reference triangle.
BaryTriple barycentric(const Triangle2& t, Point2 p);
Point2 bary_to_point(const Triangle2& t, const BaryTriple& b);

/// Crossing of the segment with endpoints b_start, b_end (barycentric w.r.t.
/// the same reference triangle) with the line of side k, i.e. the point
/// where component k vanishes. Throws Error(NoCrossing) unless the two
/// k-components have strictly opposite signs.
BaryTriple side_crossing(const BaryTriple& b_start, const BaryTriple& b_end,
                         std::size_t k);

/// 1e-9 times the larger of the two triangle diameters.
double default_dup_tolerance(const Triangle2& t1, const Triangle2& t2);

/// Over-collects the vertices of t1 ∩ t2 (vertices of each triangle inside
/// or on the other, plus all side-side crossings) and merges points closer
/// than dup_tol. Both triangles must be non-degenerate.
ConvexPolygon intersection_vertices(const Triangle2& t1, const Triangle2& t2,
                                    double dup_tol);
ConvexPolygon intersection_vertices(const Triangle2& t1, const Triangle2& t2);

/// Area of the convex hull of an unordered convex vertex set: fan
/// triangulation around the first vertex after sorting by ray angle from the
/// centroid.
double convex_polygon_area(std::span<const Point2> vertices);

/// Area of t1 ∩ t2. A pruned intersection thinner than dup_tol counts as
/// empty. Throws Error(Degenerate) if either triangle is degenerate.
double triangle_intersection_area(const Triangle2& t1, const Triangle2& t2,
                                  double dup_tol);
double triangle_intersection_area(const Triangle2& t1, const Triangle2& t2);

}  // namespace awarp
