// SPDX-License-Identifier: Apache-2.0
#include "awarp/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "awarp/parallel.hpp"

namespace awarp::oracle {
namespace {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::array<Point2, 3> ccw(const Triangle2& t) {
  std::array<Point2, 3> v = t.v;
  if (cross(v[0], v[1], v[2]) < 0) std::swap(v[1], v[2]);
  return v;
}

double shoelace(const std::vector<Point2>& poly) {
  double s = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Point2& a = poly[k];
    const Point2& b = poly[(k + 1) % poly.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return std::abs(s) / 2;
}

// Edge function a*x + b*y + c, non-negative on the left of p->q.
struct HalfPlane {
  double a, b, c;

  HalfPlane(Point2 p, Point2 q)
      : a(-(q.y - p.y)), b(q.x - p.x), c(-(a * p.x + b * p.y)) {}
  double eval(double x, double y) const { return a * x + b * y + c; }
};

}  // namespace

double clip_oracle_area(const Triangle2& t1, const Triangle2& t2) {
  const auto subj = ccw(t1);
  const auto clip = ccw(t2);
  std::vector<Point2> poly(subj.begin(), subj.end());
  for (std::size_t e = 0; e < 3 && !poly.empty(); ++e) {
    const Point2 p = clip[e];
    const Point2 q = clip[(e + 1) % 3];
    std::vector<Point2> out;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Point2 a = poly[k];
      const Point2 b = poly[(k + 1) % poly.size()];
      const double da = cross(p, q, a);
      const double db = cross(p, q, b);
      if (da >= 0) out.push_back(a);
      if ((da >= 0) != (db >= 0)) {
        const double s = da / (da - db);
        out.push_back({a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)});
      }
    }
    poly = std::move(out);
  }
  return poly.size() < 3 ? 0.0 : shoelace(poly);
}

McEstimate mc_oracle_area(const Triangle2& t1, const Triangle2& t2,
                          std::uint64_t n_samples, std::uint64_t seed) {
  const auto a = ccw(t1);
  const auto b = ccw(t2);
  const std::array<HalfPlane, 6> planes = {
      HalfPlane(a[0], a[1]), HalfPlane(a[1], a[2]), HalfPlane(a[2], a[0]),
      HalfPlane(b[0], b[1]), HalfPlane(b[1], b[2]), HalfPlane(b[2], b[0])};

  const double x0 = std::min({a[0].x, a[1].x, a[2].x});
  const double x1 = std::max({a[0].x, a[1].x, a[2].x});
  const double y0 = std::min({a[0].y, a[1].y, a[2].y});
  const double y1 = std::max({a[0].y, a[1].y, a[2].y});
  const double box = (x1 - x0) * (y1 - y0);

  const auto m = static_cast<std::uint64_t>(
      std::ceil(std::sqrt(static_cast<double>(std::max<std::uint64_t>(n_samples, 1)))));
  const std::uint64_t n = m * m;
  const double hx = (x1 - x0) / static_cast<double>(m);
  const double hy = (y1 - y0) / static_cast<double>(m);

  SplitMix64 rng{seed};
  std::uint64_t hits = 0;
  for (std::uint64_t iy = 0; iy < m; ++iy) {
    for (std::uint64_t ix = 0; ix < m; ++ix) {
      const std::uint64_t r = rng.next();
      const double ux = static_cast<double>(r >> 40) * 0x1.0p-24;
      const double uy = static_cast<double>((r >> 16) & 0xFFFFFFu) * 0x1.0p-24;
      const double x = x0 + (static_cast<double>(ix) + ux) * hx;
      const double y = y0 + (static_cast<double>(iy) + uy) * hy;
      bool in = true;
      for (const HalfPlane& h : planes) {
        if (h.eval(x, y) < 0) {
          in = false;
          break;
        }
      }
      hits += in ? 1 : 0;
    }
  }
  const double nd = static_cast<double>(n);
  // Agresti-Coull adjusted proportion keeps the error bar non-zero when the
  // hit count is 0 or n.
  const double p_adj = (static_cast<double>(hits) + 2.0) / (nd + 4.0);
  return {box * static_cast<double>(hits) / nd,
          box * std::sqrt(p_adj * (1.0 - p_adj) / nd)};
}

std::vector<CorpusCase> topological_corpus() {
  using T = Triangle2;
  // Frozen representatives from a seeded search over overlap classes,
  // coordinates rounded while keeping the class.
  return {
      {"3000", T{{{{0.36, 0.86}, {0.45, 0.95}, {0.4, 0.74}}}}, T{{{{0.81, 0.0}, {0.06, 0.5}, {0.53, 1.09}}}}},
      {"0003", T{{{{0.59, 0.75}, {0.89, 0.43}, {0.13, 0.17}}}}, T{{{{0.61, 0.61}, {0.64, 0.46}, {0.53, 0.53}}}}},
      {"2210", T{{{{0.65, 0.63}, {0.74, 0.7}, {0.48, 0.05}}}}, T{{{{0.77, 0.82}, {0.84, 0.6}, {0.04, 0.2}}}}},
      {"0222", T{{{{0.91, 0.88}, {0.1, 0.82}, {0.77, 0.2}}}}, T{{{{0.57, 0.53}, {0.41, 0.59}, {0.39, 0.53}}}}},
      {"1210", T{{{{0.51, 0.21}, {0.6, 0.85}, {0.15, 0.5}}}}, T{{{{0.09, 0.04}, {0.95, 0.56}, {0.52, 0.06}}}}},
      {"0221", T{{{{0.37, 0.52}, {0.92, 0.61}, {0.29, 0.98}}}}, T{{{{0.46, 0.36}, {0.56, 0.38}, {0.44, 0.6}}}}},
      {"1221a", T{{{{0.11, 0.39}, {0.53, 0.4}, {0.38, 0.59}}}}, T{{{{0.59, 0.45}, {0.41, 0.26}, {0.46, 0.4}}}}},
      {"1221b", T{{{{0.47, 0.23}, {0.66, 0.32}, {0.1, 0.45}}}}, T{{{{0.69, 0.31}, {0.54, 0.45}, {0.51, 0.32}}}}},
      {"2221a", T{{{{0.74, 0.81}, {0.51, 0.06}, {0.47, 0.9}}}}, T{{{{0.45, 0.97}, {0.57, 0.33}, {1.27, 0.83}}}}},
      {"2221b", T{{{{0.49, 0.84}, {0.83, 0.42}, {0.27, 0.39}}}}, T{{{{0.34, 0.43}, {1.1, 0.43}, {-0.23, 0.34}}}}},
      {"1222a", T{{{{0.7, 0.47}, {0.11, 0.19}, {0.77, 0.07}}}}, T{{{{0.53, 0.38}, {0.71, 0.53}, {0.68, 0.26}}}}},
      {"1222b", T{{{{0.403, 0.534}, {0.228, 0.557}, {0.987, 0.951}}}}, T{{{{0.342, 0.616}, {0.602, 0.741}, {0.49, 0.34}}}}},
      {"1420", T{{{{0.99, 0.23}, {0.44, 0.25}, {0.59, 0.62}}}}, T{{{{0.8, 0.71}, {0.26, 0.42}, {0.53, 0.0}}}}},
      {"0431", T{{{{0.04, 0.92}, {0.37, 0.13}, {0.94, 0.73}}}}, T{{{{0.52, 0.0}, {0.59, 0.79}, {0.25, 0.97}}}}},
      {"1431a", T{{{{0.03, 0.04}, {0.78, 0.84}, {0.38, 0.47}}}}, T{{{{0.57, 0.31}, {0.34, 0.39}, {0.26, 0.7}}}}},
      {"1431b", T{{{{0.8823, 0.495}, {0.4157, 0.9138}, {0.0452, 0.0569}}}}, T{{{{0.2925, 0.1377}, {0.4193, 0.9352}, {0.1044, 0.1493}}}}},
      {"1431c", T{{{{0.49, 0.15}, {0.06, 0.8}, {0.55, 0.68}}}}, T{{{{0.21, 0.76}, {0.1, 0.35}, {0.95, 0.6}}}}},
      {"1431d", T{{{{0.46, 0.84}, {0.24, 0.55}, {0.91, 0.83}}}}, T{{{{0.86, 0.53}, {0.65, 0.78}, {0.25, 0.96}}}}},
      {"0420", T{{{{0.09, 0.36}, {0.17, 0.81}, {0.85, 0.25}}}}, T{{{{0.21, 0.04}, {0.68, 1.0}, {0.64, 0.8}}}}},
      {"0630", T{{{{0.01, 0.21}, {0.06, 0.44}, {0.5, 0.22}}}}, T{{{{0.24, 0.08}, {0.03, 0.39}, {0.42, 0.94}}}}},
  };
}

namespace {

// Exact incidence classification on quarter-integer lattice coordinates.
enum class Incidence { Inside, OnSide, OnVertex, Outside };

Incidence classify(Point2 p, const std::array<Point2, 3>& t) {
  for (const Point2& v : t) {
    if (p == v) return Incidence::OnVertex;
  }
  int zero = 0;
  int neg = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double c = cross(t[k], t[(k + 1) % 3], p);
    zero += c == 0 ? 1 : 0;
    neg += c < 0 ? 1 : 0;
  }
  if (neg > 0) return Incidence::Outside;
  return zero > 0 ? Incidence::OnSide : Incidence::Inside;
}

bool proper_crossing(Point2 p, Point2 q, Point2 a, Point2 b) {
  const double d1 = cross(a, b, p);
  const double d2 = cross(a, b, q);
  const double d3 = cross(p, q, a);
  const double d4 = cross(p, q, b);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool collinear_overlap(Point2 p, Point2 q, Point2 a, Point2 b) {
  if (cross(p, q, a) != 0 || cross(p, q, b) != 0) return false;
  // Project on the dominant axis of p->q.
  const bool use_x = std::abs(q.x - p.x) >= std::abs(q.y - p.y);
  auto coord = [use_x](Point2 r) { return use_x ? r.x : r.y; };
  const double lo = std::max(std::min(coord(p), coord(q)), std::min(coord(a), coord(b)));
  const double hi = std::min(std::max(coord(p), coord(q)), std::max(coord(a), coord(b)));
  return hi > lo;
}

std::string incidence_counts(const std::array<Point2, 3>& pts,
                             const std::array<Point2, 3>& ref) {
  int counts[4] = {0, 0, 0, 0};
  for (const Point2& p : pts) ++counts[static_cast<int>(classify(p, ref))];
  std::ostringstream os;
  os << 'i' << counts[0] << 's' << counts[1] << 'v' << counts[2] << 'e' << counts[3];
  return os.str();
}

}  // namespace

std::vector<CorpusCase> degenerate_corpus() {
  const std::array<Point2, 3> ref = {Point2{0.0, 0.0}, Point2{1.0, 0.0}, Point2{0.0, 1.0}};
  std::vector<Point2> lattice;
  for (int j = -2; j <= 6; ++j) {
    for (int i = -2; i <= 6; ++i) lattice.push_back({i / 4.0, j / 4.0});
  }

  std::map<std::string, CorpusCase> found;
  const std::size_t n = lattice.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        const std::array<Point2, 3> t = {lattice[a], lattice[b], lattice[c]};
        if (cross(t[0], t[1], t[2]) == 0) continue;
        const std::array<Point2, 3> tc = ccw(Triangle2{t});

        int crossings = 0;
        int overlaps = 0;
        for (std::size_t e = 0; e < 3; ++e) {
          for (std::size_t f = 0; f < 3; ++f) {
            crossings += proper_crossing(t[e], t[(e + 1) % 3], ref[f], ref[(f + 1) % 3]) ? 1 : 0;
            overlaps += collinear_overlap(t[e], t[(e + 1) % 3], ref[f], ref[(f + 1) % 3]) ? 1 : 0;
          }
        }
        const std::string c1 = incidence_counts(t, ref);
        const std::string c2 = incidence_counts(ref, tc);
        const bool degenerate = overlaps > 0 || c1.find("s0v0") == std::string::npos ||
                                c2.find("s0v0") == std::string::npos;
        if (!degenerate) continue;
        const bool touching_only = clip_oracle_area(Triangle2{t}, Triangle2{ref}) == 0.0;
        std::ostringstream key;
        key << c1 << '/' << c2 << "/x" << crossings << "/c" << overlaps
            << (touching_only ? "/touch" : "");
        found.emplace(key.str(), CorpusCase{key.str(), Triangle2{t}, Triangle2{ref}});
      }
    }
  }
  std::vector<CorpusCase> out;
  out.reserve(found.size());
  for (auto& [key, value] : found) out.push_back(std::move(value));
  return out;
}

std::vector<CorpusCase> random_corpus(std::size_t count, std::uint64_t seed) {
  SplitMix64 rng{seed};
  auto random_triangle = [&rng]() {
    for (;;) {
      Triangle2 t{{{{rng.uniform(), rng.uniform()},
                    {rng.uniform(), rng.uniform()},
                    {rng.uniform(), rng.uniform()}}}};
      if (std::abs(signed_area(t)) > 1e-4) return t;
    }
  };
  std::vector<CorpusCase> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Triangle2 t2 = random_triangle();
    Triangle2 t1 = random_triangle();
    std::string label = "random";
    if (k % 5 == 4) {
      const std::size_t side = static_cast<std::size_t>(rng.next() % 3);
      const double s = rng.uniform();
      const Point2 p = t2.v[side];
      const Point2 q = t2.v[(side + 1) % 3];
      t1.v[0] = {p.x + s * (q.x - p.x), p.y + s * (q.y - p.y)};
      while (std::abs(signed_area(t1)) <= 1e-4) {
        t1.v[1] = {rng.uniform(), rng.uniform()};
        t1.v[2] = {rng.uniform(), rng.uniform()};
      }
      label = "snapped";
    }
    out.push_back({label + "#" + std::to_string(k), t1, t2});
  }
  return out;
}

SelftestSummary run_selftest(const SelftestOptions& opts,
                             const std::function<void(const CaseResult&)>& on_case) {
  struct Job {
    const char* group;
    CorpusCase c;
  };
  std::vector<Job> jobs;
  for (CorpusCase& c : topological_corpus()) jobs.push_back({"topological", std::move(c)});
  for (CorpusCase& c : degenerate_corpus()) jobs.push_back({"degenerate", std::move(c)});
  for (CorpusCase& c : random_corpus(opts.random_pairs, opts.seed)) {
    jobs.push_back({"random", std::move(c)});
  }

  // Case k always uses Monte Carlo seed opts.seed + k + 1, so results do not
  // depend on the thread count.
  std::vector<CaseResult> results(jobs.size());
  const auto bounds = chunk_bounds(static_cast<std::int64_t>(jobs.size()),
                                   resolve_threads(opts.threads));
  run_chunks(bounds, [&](std::size_t, std::int64_t k0, std::int64_t k1) {
    for (auto k = static_cast<std::size_t>(k0); k < static_cast<std::size_t>(k1); ++k) {
      const CorpusCase& c = jobs[k].c;
      CaseResult& r = results[k];
      r.group = jobs[k].group;
      r.label = c.label;
      r.area = triangle_intersection_area(c.t1, c.t2);
      const double swapped = triangle_intersection_area(c.t2, c.t1);
      r.symmetric = std::abs(r.area - swapped) <= 1e-12;
      r.clip_area = clip_oracle_area(c.t1, c.t2);
      const double scale = std::max(std::abs(signed_area(c.t1)), std::abs(signed_area(c.t2)));
      r.clip_ok = std::abs(r.area - r.clip_area) <= 1e-10 * scale;
      const McEstimate mc = mc_oracle_area(c.t1, c.t2, opts.mc_samples, opts.seed + k + 1);
      r.mc_area = mc.estimate;
      r.mc_stderr = mc.stderr_;
      r.mc_ok = std::abs(r.area - mc.estimate) <= 4.0 * mc.stderr_;
    }
  });

  SelftestSummary summary;
  for (const CaseResult& r : results) {
    std::size_t* total = &summary.random_total;
    std::size_t* passed = &summary.random_passed;
    if (r.group == "topological") {
      total = &summary.topological_total;
      passed = &summary.topological_passed;
    } else if (r.group == "degenerate") {
      total = &summary.degenerate_total;
      passed = &summary.degenerate_passed;
    }
    ++*total;
    *passed += r.passed() ? 1 : 0;
    if (on_case) on_case(r);
  }
  return summary;
}

}  // namespace awarp::oracle
