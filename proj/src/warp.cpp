// SPDX-License-Identifier: Apache-2.0
#include "awarp/warp.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "awarp/error.hpp"
#include "awarp/parallel.hpp"

namespace awarp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool key_less(const WarpEntry& a, const WarpEntry& b) {
  if (a.l != b.l) return a.l < b.l;
  if (a.m != b.m) return a.m < b.m;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

bool same_key(const WarpEntry& a, const WarpEntry& b) {
  return a.l == b.l && a.m == b.m && a.i == b.i && a.j == b.j;
}

void check_index_range(const GridFrame& f, const char* what) {
  constexpr auto kMax = static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max());
  if (f.nx > kMax || f.ny > kMax) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " frame too large");
  }
}

// Mapped pixel corners, (nx+1) x (ny+1), row-major.
class CornerGrid {
 public:
  CornerGrid(const CoordinateMap& map, const GridFrame& src, unsigned threads)
      : cols_(static_cast<std::size_t>(src.nx + 1)),
        pts_(cols_ * static_cast<std::size_t>(src.ny + 1)) {
    if (!map.forward) throw Error(ErrorKind::InvalidArgument, "map has no forward function");
    parallel_for_rows(src.ny + 1, threads, [&](std::int64_t r0, std::int64_t r1) {
      for (std::int64_t r = r0; r < r1; ++r) {
        for (std::int64_t c = 0; c <= src.nx; ++c) {
          const Point2 q = map.forward({src.edge_x(c), src.edge_y(r)});
          if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
            throw Error(ErrorKind::Singular,
                        map.name + ": non-finite image of a source pixel corner");
          }
          pts_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)] = q;
        }
      }
    });
  }

  Point2 at(std::int64_t i, std::int64_t j) const {
    return pts_[static_cast<std::size_t>(j) * cols_ + static_cast<std::size_t>(i)];
  }

  Box quad_box(std::int64_t i, std::int64_t j) const {
    const Point2 c[4] = {at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)};
    Box b{c[0].x, c[0].y, c[0].x, c[0].y};
    for (const Point2& p : c) {
      b.xmin = std::min(b.xmin, p.x);
      b.xmax = std::max(b.xmax, p.x);
      b.ymin = std::min(b.ymin, p.y);
      b.ymax = std::max(b.ymax, p.y);
    }
    return b;
  }

 private:
  std::size_t cols_;
  std::vector<Point2> pts_;
};

struct RowStats {
  std::uint64_t skipped = 0;
  double mapped = 0.0;
  double covered = 0.0;
};

class PixelWorker {
 public:
  PixelWorker(const CornerGrid& corners, const GridFrame& dst, WeightingRule rule,
              const BuildOptions& opt)
      : corners_(corners),
        dst_(dst),
        rule_(rule),
        opt_(opt),
        dst_diameter_(std::hypot(dst.dx, dst.dy)) {}

  void run(std::int64_t i, std::int64_t j, std::vector<WarpEntry>& out, RowStats& stats) {
    const Point2 c00 = corners_.at(i, j);
    const Point2 c10 = corners_.at(i + 1, j);
    const Point2 c01 = corners_.at(i, j + 1);
    const Point2 c11 = corners_.at(i + 1, j + 1);
    const Triangle2 halves[2] = {Triangle2{{c00, c11, c01}}, Triangle2{{c00, c10, c11}}};
    const double area[2] = {std::abs(signed_area(halves[0])), std::abs(signed_area(halves[1]))};
    const bool degenerate[2] = {is_degenerate(halves[0]), is_degenerate(halves[1])};
    stats.mapped += area[0] + area[1];

    const IndexWindow w = candidate_pixels(dst_, corners_.quad_box(i, j));
    if (w.empty()) return;
    const std::int64_t wcols = w.i1 - w.i0 + 1;
    acc_.assign(static_cast<std::size_t>(wcols * (w.j1 - w.j0 + 1)), 0.0);

    for (int h = 0; h < 2; ++h) {
      if (degenerate[h]) {
        ++stats.skipped;
        deposit_at_centroid(halves[h], w, degenerate_share(h, area), area[h], stats);
        continue;
      }
      const double scale = overlap_scale(h, area);
      const double dup = opt_.dup_factor * std::max(dst_diameter_, diameter(halves[h]));
      for (std::int64_t m = w.j0; m <= w.j1; ++m) {
        for (std::int64_t l = w.i0; l <= w.i1; ++l) {
          double overlap = 0.0;
          overlap += triangle_intersection_area(hemipixel_triangle(dst_, {l, m, Half::Upper}),
                                                halves[h], dup);
          overlap += triangle_intersection_area(hemipixel_triangle(dst_, {l, m, Half::Lower}),
                                                halves[h], dup);
          if (overlap == 0.0) continue;
          stats.covered += overlap;
          acc_[static_cast<std::size_t>((m - w.j0) * wcols + (l - w.i0))] += overlap * scale;
        }
      }
    }

    for (std::int64_t l = w.i0; l <= w.i1; ++l) {
      for (std::int64_t m = w.j0; m <= w.j1; ++m) {
        const double wt = acc_[static_cast<std::size_t>((m - w.j0) * wcols + (l - w.i0))];
        if (wt > opt_.prune_threshold) {
          out.push_back({static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(m),
                         static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), wt});
        }
      }
    }
  }

 private:
  // Weight per unit overlap area of a non-degenerate half.
  double overlap_scale(int h, const double (&area)[2]) const {
    switch (rule_) {
      case WeightingRule::Hemipixel:
        return 1.0 / (2.0 * area[h]);
      case WeightingRule::PixelUniform:
        return 1.0 / (area[0] + area[1]);
      case WeightingRule::WeightedArea:
        break;
    }
    return 1.0 / dst_.pixel_area();
  }

  // Column mass a degenerate half would have spread by overlaps.
  double degenerate_share(int h, const double (&area)[2]) const {
    switch (rule_) {
      case WeightingRule::Hemipixel:
        return 0.5;
      case WeightingRule::PixelUniform: {
        const double d = area[0] + area[1];
        return d > 0.0 ? area[h] / d : 0.5;
      }
      case WeightingRule::WeightedArea:
        break;
    }
    return area[h] / dst_.pixel_area();
  }

  void deposit_at_centroid(const Triangle2& t, const IndexWindow& w, double share, double area,
                           RowStats& stats) {
    const double cx = (t.v[0].x + t.v[1].x + t.v[2].x) / 3.0;
    const double cy = (t.v[0].y + t.v[1].y + t.v[2].y) / 3.0;
    const double fl = std::floor((cx - dst_.x0) / dst_.dx);
    const double fm = std::floor((cy - dst_.y0) / dst_.dy);
    if (!(fl >= static_cast<double>(w.i0) && fl <= static_cast<double>(w.i1) &&
          fm >= static_cast<double>(w.j0) && fm <= static_cast<double>(w.j1))) {
      return;
    }
    const auto l = static_cast<std::int64_t>(fl);
    const auto m = static_cast<std::int64_t>(fm);
    stats.covered += area;
    acc_[static_cast<std::size_t>((m - w.j0) * (w.i1 - w.i0 + 1) + (l - w.i0))] += share;
  }

  const CornerGrid& corners_;
  const GridFrame& dst_;
  WeightingRule rule_;
  const BuildOptions& opt_;
  double dst_diameter_;
  std::vector<double> acc_;
};

}  // namespace

std::string_view to_string(WeightingRule rule) {
  switch (rule) {
    case WeightingRule::Hemipixel:
      return "hemi";
    case WeightingRule::PixelUniform:
      return "pixel";
    case WeightingRule::WeightedArea:
      return "area";
  }
  return "?";
}

WeightingRule parse_weighting_rule(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "hemi" || s == "hemipixel") return WeightingRule::Hemipixel;
  if (s == "pixel" || s == "pixeluniform") return WeightingRule::PixelUniform;
  if (s == "area" || s == "weightedarea") return WeightingRule::WeightedArea;
  throw Error(ErrorKind::InvalidArgument, "unknown weighting rule: " + std::string(text));
}

WarpMatrix build_matrix(const CoordinateMap& map, const GridFrame& src, const GridFrame& dst,
                        WeightingRule rule, const BuildOptions& options) {
  src.validate();
  dst.validate();
  check_index_range(src, "source");
  check_index_range(dst, "destination");
  if (!(options.dup_factor >= 0.0) || !std::isfinite(options.dup_factor)) {
    throw Error(ErrorKind::InvalidArgument, "dup_factor must be finite and >= 0");
  }
  const unsigned threads = resolve_threads(options.threads);
  const CornerGrid corners(map, src, threads);

  const auto rows = static_cast<std::size_t>(src.ny);
  std::vector<RowStats> row_stats(rows);
  const std::vector<std::int64_t> bounds = chunk_bounds(src.ny, threads);
  std::vector<std::vector<WarpEntry>> parts(bounds.size() - 1);

  run_chunks(bounds, [&](std::size_t chunk, std::int64_t j0, std::int64_t j1) {
    PixelWorker worker(corners, dst, rule, options);
    auto& out = parts[chunk];
    for (std::int64_t j = j0; j < j1; ++j) {
      RowStats& st = row_stats[static_cast<std::size_t>(j)];
      for (std::int64_t i = 0; i < src.nx; ++i) worker.run(i, j, out, st);
    }
  });

  WarpMatrix b;
  b.dst_frame = dst;
  b.src_frame = src;
  b.rule = rule;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  b.entries.reserve(total);
  for (auto& p : parts) {
    b.entries.insert(b.entries.end(), p.begin(), p.end());
    std::vector<WarpEntry>().swap(p);
  }
  // Keys are unique: one entry per (l, m) for each source pixel.
  std::sort(b.entries.begin(), b.entries.end(), key_less);
  for (const RowStats& st : row_stats) {
    b.skipped_degenerate += st.skipped;
    b.mapped_area += st.mapped;
    b.covered_area += st.covered;
  }
  return b;
}

IntensityImage apply(const WarpMatrix& b, const IntensityImage& img, unsigned threads) {
  const GridFrame& f = img.frame();
  if (f.nx != b.src_frame.nx || f.ny != b.src_frame.ny) {
    throw Error(ErrorKind::InvalidArgument, "apply: image size does not match matrix source");
  }
  const std::size_t ch = img.channels();
  IntensityImage out(b.dst_frame, ch);
  const auto in = img.values();
  auto ov = out.values();
  const auto nx1 = static_cast<std::size_t>(f.nx);
  const auto nx2 = static_cast<std::size_t>(b.dst_frame.nx);

  // Chunk boundaries never split one destination pixel's run of entries.
  const std::size_t n = b.entries.size();
  const unsigned t = std::max(1u, std::min<unsigned>(resolve_threads(threads),
                                                      static_cast<unsigned>(n / 4096 + 1)));
  std::vector<std::int64_t> bounds = chunk_bounds(static_cast<std::int64_t>(n), t);
  for (std::size_t k = 1; k + 1 < bounds.size(); ++k) {
    auto p = static_cast<std::size_t>(bounds[k]);
    while (p < n && p > 0 && b.entries[p].l == b.entries[p - 1].l &&
           b.entries[p].m == b.entries[p - 1].m) {
      ++p;
    }
    bounds[k] = std::max(static_cast<std::int64_t>(p), bounds[k - 1]);
  }

  run_chunks(bounds, [&](std::size_t, std::int64_t e0, std::int64_t e1) {
    for (auto e = static_cast<std::size_t>(e0); e < static_cast<std::size_t>(e1); ++e) {
      const WarpEntry& en = b.entries[e];
      if (en.l >= nx2 || en.m >= static_cast<std::size_t>(b.dst_frame.ny) || en.i >= nx1 ||
          en.j >= static_cast<std::size_t>(f.ny)) {
        throw Error(ErrorKind::OutOfRange, "apply: matrix entry outside frames");
      }
      const std::size_t o = (en.m * nx2 + en.l) * ch;
      const std::size_t s = (en.j * nx1 + en.i) * ch;
      for (std::size_t c = 0; c < ch; ++c) ov[o + c] += en.weight * in[s + c];
    }
  });
  return out;
}

WarpReport report(const WarpMatrix& b, const CoordinateMap& map, const IntensityImage& src,
                  const IntensityImage& dst) {
  WarpReport r;
  r.nnz = b.nnz();
  r.skipped_degenerate = b.skipped_degenerate;
  r.lost_fraction = b.lost_fraction();

  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : total_intensity(src)) s1 += v;
  for (double v : total_intensity(dst)) s2 += v;
  if (s1 != 0.0) {
    r.delta = (s1 - s2) / s1;
  } else {
    r.delta = s2 == 0.0 ? 0.0 : -std::copysign(std::numeric_limits<double>::infinity(), s2);
  }

  const GridFrame& sf = b.src_frame;
  const GridFrame& df = b.dst_frame;
  const auto nx1 = static_cast<std::size_t>(sf.nx);
  const auto nx2 = static_cast<std::size_t>(df.nx);
  std::vector<double> colsum(static_cast<std::size_t>(sf.pixel_count()), 0.0);
  std::vector<double> rowsum(static_cast<std::size_t>(df.pixel_count()), 0.0);
  for (const WarpEntry& e : b.entries) {
    colsum[e.j * nx1 + e.i] += e.weight;
    rowsum[e.m * nx2 + e.l] += e.weight;
  }

  r.column_sum_min = kNaN;
  r.column_sum_max = kNaN;
  if (map.forward) {
    std::vector<Point2> prev(nx1 + 1);
    std::vector<Point2> cur(nx1 + 1);
    std::vector<bool> prev_ok(nx1 + 1);
    std::vector<bool> cur_ok(nx1 + 1);
    auto inside = [&df](Point2 q) {
      return q.x >= df.x0 && q.x <= df.x_end() && q.y >= df.y0 && q.y <= df.y_end();
    };
    auto eval_row = [&](std::int64_t jj, std::vector<Point2>& pts, std::vector<bool>& ok) {
      for (std::size_t c = 0; c <= nx1; ++c) {
        try {
          pts[c] = map.forward({sf.edge_x(static_cast<std::int64_t>(c)), sf.edge_y(jj)});
          ok[c] = inside(pts[c]);
        } catch (const Error&) {
          ok[c] = false;
        }
      }
    };
    eval_row(0, prev, prev_ok);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::int64_t j = 0; j < sf.ny; ++j) {
      eval_row(j + 1, cur, cur_ok);
      for (std::size_t i = 0; i < nx1; ++i) {
        if (!(prev_ok[i] && prev_ok[i + 1] && cur_ok[i] && cur_ok[i + 1])) continue;
        const double c = colsum[static_cast<std::size_t>(j) * nx1 + i];
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        ++r.fully_covered_columns;
      }
      std::swap(prev, cur);
      std::swap(prev_ok, cur_ok);
    }
    if (r.fully_covered_columns > 0) {
      r.column_sum_min = lo;
      r.column_sum_max = hi;
    }
  }

  r.row_sum_median_rel_error = kNaN;
  const bool rule_allows = !b.rule || *b.rule != WeightingRule::WeightedArea;
  if (rule_allows && map.has_inverse_jacobian()) {
    const double s = df.pixel_area() / sf.pixel_area();
    std::vector<double> rel;
    for (std::int64_t m = 1; m + 1 < df.ny; ++m) {
      for (std::int64_t l = 1; l + 1 < df.nx; ++l) {
        double jinv = 0.0;
        try {
          jinv = map.eval_inverse_jacobian({df.center_x(l), df.center_y(m)});
        } catch (const Error&) {
          continue;
        }
        const double expect = s * std::abs(jinv);
        if (!(expect > 0.0) || !std::isfinite(expect)) continue;
        const double got = rowsum[static_cast<std::size_t>(m) * nx2 + static_cast<std::size_t>(l)];
        rel.push_back(std::abs(got - expect) / expect);
      }
    }
    if (!rel.empty()) {
      auto mid = rel.begin() + static_cast<std::ptrdiff_t>(rel.size() / 2);
      std::nth_element(rel.begin(), mid, rel.end());
      r.row_sum_median_rel_error = *mid;
      r.row_sum_samples = rel.size();
    }
  }
  return r;
}

void write_matrix(const WarpMatrix& b, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot create " + path.string());
  std::string buf = "AWM1 " + std::to_string(b.dst_frame.nx) + ' ' +
                    std::to_string(b.dst_frame.ny) + ' ' + std::to_string(b.src_frame.nx) +
                    ' ' + std::to_string(b.src_frame.ny) + ' ' + std::to_string(b.nnz()) + '\n';
  char line[128];
  for (const WarpEntry& e : b.entries) {
    char* p = line;
    char* const end = line + sizeof line;
    for (std::uint32_t v : {e.l, e.m, e.i, e.j}) {
      p = std::to_chars(p, end, v).ptr;
      *p++ = ' ';
    }
    p = std::to_chars(p, end, e.weight, std::chars_format::scientific, 16).ptr;
    *p++ = '\n';
    buf.append(line, p);
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

WarpMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const char* p = text.data();
  const char* const end = p + text.size();

  auto fail = [&path](const std::string& why) -> Error {
    return Error(ErrorKind::Format, path.string() + ": " + why);
  };
  auto skip_blank = [&] {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  };
  auto end_line = [&] {
    skip_blank();
    if (p == end || *p != '\n') throw fail("expected end of line");
    ++p;
  };
  auto read_uint = [&](std::uint64_t& v) {
    skip_blank();
    auto [q, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || q == p) throw fail("expected unsigned integer");
    p = q;
  };

  if (text.compare(0, 4, "AWM1") != 0) throw fail("missing AWM1 magic");
  p += 4;
  std::uint64_t dims[5] = {};
  for (auto& d : dims) read_uint(d);
  end_line();
  for (int k = 0; k < 4; ++k) {
    if (dims[k] == 0 || dims[k] > std::numeric_limits<std::uint32_t>::max()) {
      throw fail("bad dimension");
    }
  }
  // Shortest possible entry line is "0 0 0 0 0\n".
  if (dims[4] > text.size() / 10) throw fail("entry count exceeds file size");

  WarpMatrix b;
  b.dst_frame = GridFrame::unit(static_cast<std::int64_t>(dims[0]), static_cast<std::int64_t>(dims[1]));
  b.src_frame = GridFrame::unit(static_cast<std::int64_t>(dims[2]), static_cast<std::int64_t>(dims[3]));
  b.entries.reserve(dims[4]);
  for (std::uint64_t k = 0; k < dims[4]; ++k) {
    std::uint64_t idx[4] = {};
    for (auto& v : idx) read_uint(v);
    if (idx[0] >= dims[0] || idx[1] >= dims[1] || idx[2] >= dims[2] || idx[3] >= dims[3]) {
      throw fail("entry index out of range");
    }
    skip_blank();
    double w = 0.0;
    auto [q, ec] = std::from_chars(p, end, w);
    if (ec != std::errc() || q == p) throw fail("bad weight");
    p = q;
    if (!std::isfinite(w) || w < 0.0) throw fail("weight must be finite and >= 0");
    end_line();
    const WarpEntry e{static_cast<std::uint32_t>(idx[0]), static_cast<std::uint32_t>(idx[1]),
                      static_cast<std::uint32_t>(idx[2]), static_cast<std::uint32_t>(idx[3]), w};
    if (!b.entries.empty() && !key_less(b.entries.back(), e)) {
      throw fail(same_key(b.entries.back(), e) ? "duplicate entry" : "entries not sorted");
    }
    b.entries.push_back(e);
  }
  skip_blank();
  if (p != end) throw fail("trailing data after entries");
  return b;
}

Box mapped_bounding_box(const CoordinateMap& map, const GridFrame& src) {
  src.validate();
  Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::int64_t r = 0; r <= src.ny; ++r) {
    for (std::int64_t c = 0; c <= src.nx; ++c) {
      const Point2 q = map.forward({src.edge_x(c), src.edge_y(r)});
      if (!std::isfinite(q.x) || !std::isfinite(q.y)) {
        throw Error(ErrorKind::Singular, map.name + ": non-finite image of a source pixel corner");
      }
      b.xmin = std::min(b.xmin, q.x);
      b.xmax = std::max(b.xmax, q.x);
      b.ymin = std::min(b.ymin, q.y);
      b.ymax = std::max(b.ymax, q.y);
    }
  }
  const double px = 1e-12 * std::max(b.xmax - b.xmin, std::abs(b.xmax));
  const double py = 1e-12 * std::max(b.ymax - b.ymin, std::abs(b.ymax));
  return {b.xmin - px, b.ymin - py, b.xmax + px, b.ymax + py};
}

}  // namespace awarp
