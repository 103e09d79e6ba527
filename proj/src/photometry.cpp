// SPDX-License-Identifier: Apache-2.0
#include "awarp/photometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "awarp/baseline.hpp"
#include "awarp/error.hpp"
#include "awarp/warp.hpp"

namespace awarp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double unit_uniform(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Calls fn(i, j) for every pixel whose center is within radius of c.
template <class Fn>
void for_each_aperture_pixel(const GridFrame& f, Point2 c, double radius, Fn&& fn) {
  if (!(radius >= 0.0)) return;
  const double fi0 = std::ceil((c.x - radius - f.x0) / f.dx - 0.5);
  const double fi1 = std::floor((c.x + radius - f.x0) / f.dx - 0.5);
  const double fj0 = std::ceil((c.y - radius - f.y0) / f.dy - 0.5);
  const double fj1 = std::floor((c.y + radius - f.y0) / f.dy - 0.5);
  const auto i0 = static_cast<std::int64_t>(std::max(fi0, 0.0));
  const auto i1 = static_cast<std::int64_t>(std::min(fi1, static_cast<double>(f.nx - 1)));
  const auto j0 = static_cast<std::int64_t>(std::max(fj0, 0.0));
  const auto j1 = static_cast<std::int64_t>(std::min(fj1, static_cast<double>(f.ny - 1)));
  const double r2 = radius * radius;
  for (std::int64_t j = j0; j <= j1; ++j) {
    const double dy = f.center_y(j) - c.y;
    for (std::int64_t i = i0; i <= i1; ++i) {
      const double dx = f.center_x(i) - c.x;
      if (dx * dx + dy * dy <= r2) fn(i, j);
    }
  }
}

// Sum of |1/J_f| I over the aperture, NaN if a singularity is hit.
double inverse_jacobian_sum(const IntensityImage& img, const CoordinateMap& map, Point2 c,
                            double radius) {
  const GridFrame& f = img.frame();
  double sum = 0.0;
  try {
    for_each_aperture_pixel(f, c, radius, [&](std::int64_t i, std::int64_t j) {
      sum += std::abs(map.eval_inverse_jacobian({f.center_x(i), f.center_y(j)})) * img.at(i, j);
    });
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Singular) throw;
    return kNaN;
  }
  return sum;
}

double center_inverse_jacobian(const CoordinateMap& map, Point2 c) {
  try {
    return std::abs(map.eval_inverse_jacobian(c));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Singular) throw;
    return kNaN;
  }
}

void finish(EstimatorResult& r) {
  double acc = 0.0;
  std::size_t n = 0;
  for (double s : r.s_tilde) {
    if (std::isnan(s)) {
      ++r.flagged;
      continue;
    }
    acc += (s - 1.0) * (s - 1.0);
    ++n;
  }
  r.epsilon = n > 0 ? std::sqrt(acc / static_cast<double>(n)) : kNaN;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t e = k + 1;
    while (e < idx.size() && v[idx[e]] == v[idx[k]]) ++e;
    const double avg = 0.5 * static_cast<double>(k + e - 1);
    for (std::size_t q = k; q < e; ++q) r[idx[q]] = avg;
    k = e;
  }
  return r;
}

void put_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
    return;
  }
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

SourceField synthesize_sources(const GridFrame& frame, std::size_t count, double sigma,
                               double min_sep, double margin, std::uint64_t seed) {
  frame.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidArgument, "sources: sigma must be > 0");
  }
  if (!(min_sep >= 0.0) || !(margin >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "sources: min_sep and margin must be >= 0");
  }
  const double x0 = frame.x0 + margin;
  const double y0 = frame.y0 + margin;
  const double w = frame.x_end() - margin - x0;
  const double h = frame.y_end() - margin - y0;
  if (count > 0 && !(w > 0.0 && h > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "sources: margin leaves no room");
  }

  SourceField field;
  field.sigma = sigma;
  std::mt19937_64 rng(seed);
  const std::size_t max_tries = 1000 * count + 1000;
  std::size_t tries = 0;
  while (field.centers.size() < count) {
    if (++tries > max_tries) {
      throw Error(ErrorKind::InvalidArgument,
                  "sources: cannot place " + std::to_string(count) + " separated sources");
    }
    const double px = x0 + w * unit_uniform(rng);
    const double py = y0 + h * unit_uniform(rng);
    const bool clear = std::none_of(field.centers.begin(), field.centers.end(), [&](Point2 q) {
      return std::hypot(q.x - px, q.y - py) < min_sep;
    });
    if (clear) field.centers.push_back({px, py});
  }

  field.image = IntensityImage(frame, 1);
  std::vector<double> ex(static_cast<std::size_t>(frame.nx + 1));
  std::vector<double> ey(static_cast<std::size_t>(frame.ny + 1));
  std::vector<double> ax(static_cast<std::size_t>(frame.nx));
  std::vector<double> ay(static_cast<std::size_t>(frame.ny));
  for (const Point2& c : field.centers) {
    for (std::int64_t i = 0; i <= frame.nx; ++i) {
      ex[static_cast<std::size_t>(i)] = std::erf((frame.edge_x(i) - c.x) / sigma);
    }
    for (std::int64_t j = 0; j <= frame.ny; ++j) {
      ey[static_cast<std::size_t>(j)] = std::erf((frame.edge_y(j) - c.y) / sigma);
    }
    for (std::size_t i = 0; i < ax.size(); ++i) ax[i] = ex[i + 1] - ex[i];
    for (std::size_t j = 0; j < ay.size(); ++j) ay[j] = ey[j + 1] - ey[j];
    for (std::int64_t j = 0; j < frame.ny; ++j) {
      const double fy = 0.25 * ay[static_cast<std::size_t>(j)];
      if (fy == 0.0) continue;
      for (std::int64_t i = 0; i < frame.nx; ++i) {
        field.image.at(i, j) += fy * ax[static_cast<std::size_t>(i)];
      }
    }
  }
  return field;
}

double aperture_sum(const IntensityImage& img, Point2 center, double radius,
                    std::size_t channel) {
  double sum = 0.0;
  for_each_aperture_pixel(img.frame(), center, radius,
                          [&](std::int64_t i, std::int64_t j) { sum += img.at(i, j, channel); });
  return sum;
}

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Orig:
      return "orig";
    case Estimator::AreaWarp:
      return "area_warp";
    case Estimator::AreaResampled:
      return "area_resampled";
    case Estimator::AreaResampledCenter:
      return "area_resampled_center";
    case Estimator::Interpolation:
      return "interpolation";
    case Estimator::InterpolationCenter:
      return "interpolation_center";
  }
  return "?";
}

std::vector<EstimatorResult> run_estimators(const SourceField& field, const CoordinateMap& map,
                                            const GridFrame& dst,
                                            const EstimatorOptions& options) {
  if (!map.has_inverse() || !map.has_inverse_jacobian()) {
    throw Error(ErrorKind::InvalidArgument,
                map.name + ": photometry needs an inverse map and inverse Jacobian");
  }
  const IntensityImage& i1 = field.image;
  const GridFrame& src = i1.frame();
  BuildOptions bo;
  bo.threads = options.threads;
  const IntensityImage i2 =
      apply(build_matrix(map, src, dst, WeightingRule::PixelUniform, bo), i1, options.threads);
  const IntensityImage i2w =
      apply(build_matrix(map, src, dst, WeightingRule::WeightedArea, bo), i1, options.threads);
  const IntensityImage i2i = resample_bilinear(map, i1, dst, options.threads);

  const double radius = options.radius_sigmas * field.sigma;
  const double scale = dst.pixel_area() / src.pixel_area();
  std::vector<EstimatorResult> out;
  for (Estimator e : kAllEstimators) out.push_back({e, {}, 0.0, 0});

  for (const Point2& c : field.centers) {
    const Point2 mc = map.forward(c);
    const double jc = center_inverse_jacobian(map, mc);
    out[0].s_tilde.push_back(aperture_sum(i1, c, radius));
    out[1].s_tilde.push_back(aperture_sum(i2, mc, radius));
    out[2].s_tilde.push_back(scale * inverse_jacobian_sum(i2w, map, mc, radius));
    out[3].s_tilde.push_back(jc * scale * aperture_sum(i2w, mc, radius));
    out[4].s_tilde.push_back(scale * inverse_jacobian_sum(i2i, map, mc, radius));
    out[5].s_tilde.push_back(jc * scale * aperture_sum(i2i, mc, radius));
  }
  for (EstimatorResult& r : out) finish(r);
  return out;
}

std::vector<double> jacobian_gradient_ranking(const SourceField& field, const CoordinateMap& map) {
  std::vector<double> g;
  g.reserve(field.centers.size());
  for (const Point2& c : field.centers) {
    const Point2 d = map.jacobian_gradient ? map.jacobian_gradient(c)
                                           : numeric_jacobian_gradient(map, c, 1e-5);
    g.push_back(std::hypot(d.x, d.y));
  }
  return g;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "spearman: length mismatch");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::isnan(a[k]) || std::isnan(b[k])) continue;
    x.push_back(a[k]);
    y.push_back(b[k]);
  }
  if (x.size() < 2) return kNaN;
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

PhotometryRun run_photometry(const PhotometryConfig& config, const CoordinateMap& map) {
  if (config.src_size < 1 || config.dst_size < 1) {
    throw Error(ErrorKind::InvalidArgument, "photometry: raster sizes must be >= 1");
  }
  if (!(config.sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "photometry: sigma must be > 0");
  const double min_sep = config.min_sep > 0.0 ? config.min_sep : 10.0 * config.sigma;
  const double margin = config.margin > 0.0 ? config.margin : 6.0 * config.sigma;

  PhotometryRun run;
  run.field = synthesize_sources(GridFrame::unit(config.src_size, config.src_size),
                                 config.sources, config.sigma, min_sep, margin, config.seed);
  for (const Point2& c : run.field.centers) run.mapped_centers.push_back(map.forward(c));
  run.grad_j = jacobian_gradient_ranking(run.field, map);
  run.results = run_estimators(run.field, map, GridFrame::unit(config.dst_size, config.dst_size),
                               config.estimator);
  return run;
}

void write_photometry_csv(const PhotometryRun& run, std::ostream& out) {
  out << "k,method,x,y,X,Y,grad_J,s_tilde\n";
  for (const EstimatorResult& r : run.results) {
    for (std::size_t k = 0; k < r.s_tilde.size(); ++k) {
      out << k << ',' << to_string(r.method);
      for (double v : {run.field.centers[k].x, run.field.centers[k].y, run.mapped_centers[k].x,
                       run.mapped_centers[k].y, run.grad_j[k], r.s_tilde[k]}) {
        out << ',';
        put_number(out, v);
      }
      out << '\n';
    }
  }
  for (const EstimatorResult& r : run.results) {
    out << "epsilon," << to_string(r.method) << ",,,,,,";
    put_number(out, r.epsilon);
    out << '\n';
  }
}

}  // namespace awarp
