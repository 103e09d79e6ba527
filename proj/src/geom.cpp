// SPDX-License-Identifier: Apache-2.0
#include "awarp/geom.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "awarp/error.hpp"

namespace awarp {
namespace {

constexpr double kDegenerateAreaFactor = 1e-14;
constexpr double kOnSideFactor = 1e-12;
constexpr double kDupFactor = 1e-9;

double dist2(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double max_side2(const Triangle2& t) {
  return std::max({dist2(t.v[0], t.v[1]), dist2(t.v[1], t.v[2]),
                   dist2(t.v[2], t.v[0])});
}

// Twice the signed area.
double twice_area(const Triangle2& t) {
  const Point2& u = t.v[0];
  const Point2& v = t.v[1];
  const Point2& w = t.v[2];
  return (v.y - w.y) * (u.x - w.x) - (v.x - w.x) * (u.y - w.y);
}

bool degenerate_twice_area(const Triangle2& t, double twice_a) {
  return std::abs(0.5 * twice_a) <= kDegenerateAreaFactor * max_side2(t);
}

// Barycentric coordinates scaled by sign(A) so they sum to 2|A|.
BaryTriple bary_unchecked(const Triangle2& t, double twice_a, Point2 p) {
  const Point2& u = t.v[0];
  const Point2& v = t.v[1];
  const Point2& w = t.v[2];
  const double px = p.x - w.x;
  const double py = p.y - w.y;
  double s = (v.y - w.y) * px - (v.x - w.x) * py;
  double r = (w.y - u.y) * px - (w.x - u.x) * py;
  if (twice_a < 0) {
    s = -s;
    r = -r;
  }
  return BaryTriple{{s, r, std::abs(twice_a) - s - r}};
}

Point2 bary_point_unchecked(const Triangle2& t, double abs_twice_a,
                            const BaryTriple& b) {
  const Point2& u = t.v[0];
  const Point2& v = t.v[1];
  const Point2& w = t.v[2];
  // Relative to w, so rounding in b scales with the triangle, not with the
  // absolute coordinates.
  const double su = b[0] / abs_twice_a;
  const double sv = b[1] / abs_twice_a;
  return {w.x + su * (u.x - w.x) + sv * (v.x - w.x), w.y + su * (u.y - w.y) + sv * (v.y - w.y)};
}

bool inside_or_on(const BaryTriple& b, double tol) {
  return b[0] >= -tol && b[1] >= -tol && b[2] >= -tol;
}

void push_unique(ConvexPolygon& poly, Point2 p, double tol2) {
  for (std::size_t k = 0; k < poly.n; ++k) {
    if (dist2(poly.pts[k], p) <= tol2) return;
  }
  if (poly.n < ConvexPolygon::kCapacity) poly.push(p);
}

bool opposite_signs(double a, double b) {
  return (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0);
}

BaryTriple crossing_unchecked(const BaryTriple& b1, const BaryTriple& b2,
                              std::size_t k) {
  const double d = b2[k] - b1[k];
  const double w1 = b2[k] / d;
  const double w2 = -b1[k] / d;
  BaryTriple c;
  for (std::size_t n = 0; n < 3; ++n) c[n] = w1 * b1[n] + w2 * b2[n];
  c[k] = 0.0;
  return c;
}

}  // namespace

double signed_area(const Triangle2& t) { return 0.5 * twice_area(t); }

double diameter(const Triangle2& t) { return std::sqrt(max_side2(t)); }

bool is_degenerate(const Triangle2& t) {
  return degenerate_twice_area(t, twice_area(t));
}

BaryTriple barycentric(const Triangle2& t, Point2 p) {
  const double twice_a = twice_area(t);
  if (degenerate_twice_area(t, twice_a)) {
    throw Error(ErrorKind::Degenerate, "barycentric: degenerate reference triangle");
  }
  return bary_unchecked(t, twice_a, p);
}

Point2 bary_to_point(const Triangle2& t, const BaryTriple& b) {
  const double twice_a = twice_area(t);
  if (degenerate_twice_area(t, twice_a)) {
    throw Error(ErrorKind::Degenerate, "bary_to_point: degenerate reference triangle");
  }
  return bary_point_unchecked(t, std::abs(twice_a), b);
}

BaryTriple side_crossing(const BaryTriple& b_start, const BaryTriple& b_end,
                         std::size_t k) {
  if (k > 2) throw Error(ErrorKind::OutOfRange, "side_crossing: side index > 2");
  if (!opposite_signs(b_start[k], b_end[k])) {
    throw Error(ErrorKind::NoCrossing,
                "side_crossing: endpoints on the same side of the line");
  }
  return crossing_unchecked(b_start, b_end, k);
}

double default_dup_tolerance(const Triangle2& t1, const Triangle2& t2) {
  return kDupFactor * std::max(diameter(t1), diameter(t2));
}

ConvexPolygon intersection_vertices(const Triangle2& t1, const Triangle2& t2,
                                    double dup_tol) {
  const double a1 = twice_area(t1);
  const double a2 = twice_area(t2);
  if (degenerate_twice_area(t1, a1) || degenerate_twice_area(t2, a2)) {
    throw Error(ErrorKind::Degenerate,
                "intersection_vertices: degenerate input triangle");
  }
  const double tol1 = kOnSideFactor * std::abs(a1);
  const double tol2 = kOnSideFactor * std::abs(a2);
  const double dup2 = dup_tol * dup_tol;

  // Vertices of t1 w.r.t. t2 drive both containment and side crossings.
  std::array<BaryTriple, 3> b_of_1;
  for (std::size_t n = 0; n < 3; ++n) b_of_1[n] = bary_unchecked(t2, a2, t1.v[n]);

  ConvexPolygon poly;
  for (std::size_t n = 0; n < 3; ++n) {
    if (inside_or_on(b_of_1[n], tol2)) push_unique(poly, t1.v[n], dup2);
  }
  for (std::size_t n = 0; n < 3; ++n) {
    if (inside_or_on(bary_unchecked(t1, a1, t2.v[n]), tol1)) {
      push_unique(poly, t2.v[n], dup2);
    }
  }
  const double abs_a2 = std::abs(a2);
  for (std::size_t n = 0; n < 3; ++n) {
    const BaryTriple& bs = b_of_1[n];
    const BaryTriple& be = b_of_1[(n + 1) % 3];
    for (std::size_t k = 0; k < 3; ++k) {
      if (!opposite_signs(bs[k], be[k])) continue;
      const BaryTriple c = crossing_unchecked(bs, be, k);
      if (!inside_or_on(c, tol2)) continue;
      push_unique(poly, bary_point_unchecked(t2, abs_a2, c), dup2);
    }
  }
  return poly;
}

ConvexPolygon intersection_vertices(const Triangle2& t1, const Triangle2& t2) {
  return intersection_vertices(t1, t2, default_dup_tolerance(t1, t2));
}

double convex_polygon_area(std::span<const Point2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  if (n == 3) {
    const Point2& p1 = vertices[0];
    const Point2& p2 = vertices[1];
    const Point2& p3 = vertices[2];
    return std::abs((p3.x - p1.x) * (p2.y - p1.y) - (p2.x - p1.x) * (p3.y - p1.y)) / 2;
  }

  Point2 mid{0.0, 0.0};
  for (const Point2& p : vertices) {
    mid.x += p.x;
    mid.y += p.y;
  }
  mid.x /= static_cast<double>(n);
  mid.y /= static_cast<double>(n);

  struct Ray {
    double phi;
    double r2;
    Point2 p;
  };
  // Small fixed bound in practice; the vector path only serves arbitrary
  // callers.
  std::array<Ray, ConvexPolygon::kCapacity> small;
  std::vector<Ray> large;
  Ray* rays = small.data();
  if (n > small.size()) {
    large.resize(n);
    rays = large.data();
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Point2& p = vertices[k];
    rays[k] = {std::atan2(p.y - mid.y, p.x - mid.x), dist2(p, mid), p};
  }
  std::sort(rays, rays + n, [](const Ray& a, const Ray& b) {
    return a.phi < b.phi || (a.phi == b.phi && a.r2 < b.r2);
  });

  const Point2 p1 = rays[0].p;
  double sum = 0.0;
  for (std::size_t k = 2; k < n; ++k) {
    const Point2& prev = rays[k - 1].p;
    const Point2& cur = rays[k].p;
    sum += (prev.x - p1.x) * (cur.y - p1.y) - (cur.x - p1.x) * (prev.y - p1.y);
  }
  return std::abs(sum) / 2;
}

double triangle_intersection_area(const Triangle2& t1, const Triangle2& t2,
                                  double dup_tol) {
  if (is_degenerate(t1) || is_degenerate(t2)) {
    throw Error(ErrorKind::Degenerate,
                "triangle_intersection_area: degenerate input triangle");
  }
  const auto [min1x, max1x] = std::minmax({t1.v[0].x, t1.v[1].x, t1.v[2].x});
  const auto [min2x, max2x] = std::minmax({t2.v[0].x, t2.v[1].x, t2.v[2].x});
  if (max1x < min2x || max2x < min1x) return 0.0;
  const auto [min1y, max1y] = std::minmax({t1.v[0].y, t1.v[1].y, t1.v[2].y});
  const auto [min2y, max2y] = std::minmax({t2.v[0].y, t2.v[1].y, t2.v[2].y});
  if (max1y < min2y || max2y < min1y) return 0.0;

  // Merging near-coincident vertices would trim a wedge of up to
  // dup_tol * span from small triangles, so only exact repeats are dropped
  // here; dup_tol still decides the sliver cut below.
  const ConvexPolygon poly = intersection_vertices(t1, t2, 0.0);
  const auto verts = poly.vertices();
  const double area = convex_polygon_area(verts);
  if (area == 0.0) return 0.0;

  // Width below the merge tolerance means the overlap is a sliver along a
  // shared edge; treat it like the merged duplicates it stands for.
  double span2 = 0.0;
  for (std::size_t a = 0; a < verts.size(); ++a) {
    for (std::size_t b = a + 1; b < verts.size(); ++b) {
      span2 = std::max(span2, dist2(verts[a], verts[b]));
    }
  }
  if (area <= 0.5 * dup_tol * std::sqrt(span2)) return 0.0;
  return area;
}

double triangle_intersection_area(const Triangle2& t1, const Triangle2& t2) {
  return triangle_intersection_area(t1, t2, default_dup_tolerance(t1, t2));
}

}  // namespace awarp
