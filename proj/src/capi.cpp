// SPDX-License-Identifier: Apache-2.0
#include "awarp/awarp.h"

#include <cmath>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "awarp/baseline.hpp"
#include "awarp/error.hpp"
#include "awarp/oracle.hpp"
#include "awarp/patterns.hpp"
#include "awarp/photometry.hpp"
#include "awarp/warp.hpp"

struct awarp_map {
  awarp::CoordinateMap map;
};

struct awarp_image {
  awarp::IntensityImage img;
};

struct awarp_matrix {
  awarp::WarpMatrix b;
};

struct awarp_photometry {
  awarp::PhotometryRun run;
};

namespace {

thread_local std::string g_last_error;

awarp_status code_of(awarp::ErrorKind kind) {
  switch (kind) {
    case awarp::ErrorKind::InvalidArgument:
      return AWARP_E_INVALID_ARGUMENT;
    case awarp::ErrorKind::Io:
      return AWARP_E_IO;
    case awarp::ErrorKind::Format:
      return AWARP_E_FORMAT;
    case awarp::ErrorKind::Degenerate:
      return AWARP_E_DEGENERATE;
    case awarp::ErrorKind::NoCrossing:
      return AWARP_E_NO_CROSSING;
    case awarp::ErrorKind::Singular:
      return AWARP_E_SINGULAR;
    case awarp::ErrorKind::OutOfRange:
      return AWARP_E_OUT_OF_RANGE;
  }
  return AWARP_E_INTERNAL;
}

awarp_status fail(awarp_status s, const char* what) {
  g_last_error = what;
  return s;
}

template <class Fn>
awarp_status guard(Fn&& fn) {
  try {
    fn();
    return AWARP_OK;
  } catch (const awarp::Error& e) {
    return fail(code_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(AWARP_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(AWARP_E_INTERNAL, e.what());
  } catch (...) {
    return fail(AWARP_E_INTERNAL, "unknown exception");
  }
}

[[noreturn]] void null_argument(const char* name) {
  throw awarp::Error(awarp::ErrorKind::InvalidArgument, std::string(name) + " is NULL");
}

template <class T>
const T& need(const T* p, const char* name) {
  if (p == nullptr) null_argument(name);
  return *p;
}

template <class T>
T& need(T* p, const char* name) {
  if (p == nullptr) null_argument(name);
  return *p;
}

awarp::GridFrame to_frame(const awarp_frame* f) {
  const awarp_frame& c = need(f, "frame");
  awarp::GridFrame g{c.x0, c.y0, c.dx, c.dy, c.nx, c.ny};
  g.validate();
  return g;
}

awarp_frame from_frame(const awarp::GridFrame& g) {
  return {g.x0, g.y0, g.dx, g.dy, g.nx, g.ny};
}

awarp::WeightingRule to_rule(awarp_rule r) {
  switch (r) {
    case AWARP_RULE_HEMIPIXEL:
      return awarp::WeightingRule::Hemipixel;
    case AWARP_RULE_PIXEL_UNIFORM:
      return awarp::WeightingRule::PixelUniform;
    case AWARP_RULE_WEIGHTED_AREA:
      return awarp::WeightingRule::WeightedArea;
  }
  throw awarp::Error(awarp::ErrorKind::InvalidArgument, "unknown weighting rule");
}

awarp::ImageFormat to_format(awarp_image_format f) {
  switch (f) {
    case AWARP_FORMAT_AUTO:
      return awarp::ImageFormat::Auto;
    case AWARP_FORMAT_AWF1:
      return awarp::ImageFormat::Awf1;
    case AWARP_FORMAT_PGM8:
      return awarp::ImageFormat::Pgm8;
    case AWARP_FORMAT_PGM16:
      return awarp::ImageFormat::Pgm16;
  }
  throw awarp::Error(awarp::ErrorKind::InvalidArgument, "unknown image format");
}

void emit_image(awarp::IntensityImage img, awarp_image** out) {
  *out = new awarp_image{std::move(img)};
}

const awarp::EstimatorResult& method_result(const awarp_photometry* run, size_t method) {
  const auto& results = need(run, "run").run.results;
  if (method >= results.size()) {
    throw awarp::Error(awarp::ErrorKind::OutOfRange, "photometry method index");
  }
  return results[method];
}

}  // namespace

extern "C" {

const char* awarp_version(void) { return "1.0.0"; }

const char* awarp_last_error(void) { return g_last_error.c_str(); }

const char* awarp_status_name(awarp_status status) {
  switch (status) {
    case AWARP_OK:
      return "ok";
    case AWARP_E_INVALID_ARGUMENT:
      return "invalid argument";
    case AWARP_E_IO:
      return "i/o error";
    case AWARP_E_FORMAT:
      return "format error";
    case AWARP_E_DEGENERATE:
      return "degenerate triangle";
    case AWARP_E_NO_CROSSING:
      return "no crossing";
    case AWARP_E_SINGULAR:
      return "singular map";
    case AWARP_E_OUT_OF_RANGE:
      return "out of range";
    case AWARP_E_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

awarp_status awarp_frame_unit(int64_t nx, int64_t ny, awarp_frame* out) {
  return guard([&] { need(out, "out") = from_frame(awarp::GridFrame::unit(nx, ny)); });
}

awarp_status awarp_frame_over_box(double x0, double y0, double x1, double y1, int64_t nx,
                                  int64_t ny, awarp_frame* out) {
  return guard([&] {
    need(out, "out") = from_frame(awarp::GridFrame::over_box(x0, y0, x1, y1, nx, ny));
  });
}

awarp_status awarp_map_parse(const char* spec, awarp_map** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    *out = new awarp_map{awarp::parse_map_spec(&need(spec, "spec"))};
  });
}

void awarp_map_free(awarp_map* map) { delete map; }

awarp_status awarp_map_forward(const awarp_map* map, double x, double y, double* X, double* Y) {
  return guard([&] {
    const awarp::Point2 q = need(map, "map").map.forward({x, y});
    need(X, "X") = q.x;
    need(Y, "Y") = q.y;
  });
}

awarp_status awarp_map_inverse(const awarp_map* map, double X, double Y, double* x, double* y) {
  return guard([&] {
    const auto& m = need(map, "map").map;
    if (!m.has_inverse()) {
      throw awarp::Error(awarp::ErrorKind::InvalidArgument, m.name + ": no inverse");
    }
    const awarp::Point2 p = m.inverse({X, Y});
    need(x, "x") = p.x;
    need(y, "y") = p.y;
  });
}

int awarp_map_has_inverse(const awarp_map* map) {
  return map != nullptr && map->map.has_inverse() ? 1 : 0;
}

awarp_status awarp_map_bounding_box(const awarp_map* map, const awarp_frame* src, double box[4]) {
  return guard([&] {
    const awarp::Box b = awarp::mapped_bounding_box(need(map, "map").map, to_frame(src));
    double* o = &need(box, "box");
    o[0] = b.xmin;
    o[1] = b.ymin;
    o[2] = b.xmax;
    o[3] = b.ymax;
  });
}

awarp_status awarp_image_new(const awarp_frame* frame, size_t channels, awarp_image** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    emit_image(awarp::IntensityImage(to_frame(frame), channels), out);
  });
}

awarp_status awarp_image_read(const char* path, awarp_image** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    emit_image(awarp::read_image(&need(path, "path")), out);
  });
}

awarp_status awarp_image_write(const awarp_image* img, const char* path,
                               awarp_image_format format) {
  return guard([&] {
    awarp::write_image(need(img, "img").img, &need(path, "path"), to_format(format));
  });
}

void awarp_image_free(awarp_image* img) { delete img; }

awarp_status awarp_image_frame(const awarp_image* img, awarp_frame* out) {
  return guard([&] { need(out, "out") = from_frame(need(img, "img").img.frame()); });
}

awarp_status awarp_image_set_frame(awarp_image* img, const awarp_frame* frame) {
  return guard([&] { need(img, "img").img.set_frame(to_frame(frame)); });
}

size_t awarp_image_channels(const awarp_image* img) {
  return img == nullptr ? 0 : img->img.channels();
}

double* awarp_image_data(awarp_image* img) {
  return img == nullptr ? nullptr : img->img.values().data();
}

awarp_status awarp_image_total(const awarp_image* img, double* out) {
  return guard([&] {
    double s = 0.0;
    for (double v : awarp::total_intensity(need(img, "img").img)) s += v;
    need(out, "out") = s;
  });
}

awarp_status awarp_pattern_checker(int64_t nx, int64_t ny, int64_t cell, awarp_image** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    emit_image(awarp::make_checker(nx, ny, cell), out);
  });
}

awarp_status awarp_pattern_bars(int64_t nx, int64_t ny, awarp_image** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    emit_image(awarp::make_bars(nx, ny), out);
  });
}

awarp_status awarp_pattern_sources(int64_t nx, int64_t ny, size_t count, double sigma,
                                   double min_sep, double margin, uint64_t seed,
                                   awarp_image** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    if (!(sigma > 0.0)) {
      throw awarp::Error(awarp::ErrorKind::InvalidArgument, "sources: sigma must be > 0");
    }
    awarp::SourceField f = awarp::synthesize_sources(
        awarp::GridFrame::unit(nx, ny), count, sigma, min_sep > 0.0 ? min_sep : 10.0 * sigma,
        margin > 0.0 ? margin : 6.0 * sigma, seed);
    emit_image(std::move(f.image), out);
  });
}

void awarp_build_options_init(awarp_build_options* opts) {
  if (opts == nullptr) return;
  const awarp::BuildOptions d;
  *opts = {d.threads, d.dup_factor, d.prune_threshold};
}

awarp_status awarp_rule_parse(const char* text, awarp_rule* out) {
  return guard([&] {
    switch (awarp::parse_weighting_rule(&need(text, "text"))) {
      case awarp::WeightingRule::Hemipixel:
        need(out, "out") = AWARP_RULE_HEMIPIXEL;
        break;
      case awarp::WeightingRule::PixelUniform:
        need(out, "out") = AWARP_RULE_PIXEL_UNIFORM;
        break;
      case awarp::WeightingRule::WeightedArea:
        need(out, "out") = AWARP_RULE_WEIGHTED_AREA;
        break;
    }
  });
}

awarp_status awarp_matrix_build(const awarp_map* map, const awarp_frame* src,
                                const awarp_frame* dst, awarp_rule rule,
                                const awarp_build_options* opts, awarp_matrix** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    awarp::BuildOptions o;
    if (opts != nullptr) {
      o.threads = opts->threads;
      o.dup_factor = opts->dup_factor;
      o.prune_threshold = opts->prune_threshold;
    }
    *out = new awarp_matrix{
        awarp::build_matrix(need(map, "map").map, to_frame(src), to_frame(dst), to_rule(rule), o)};
  });
}

void awarp_matrix_free(awarp_matrix* b) { delete b; }

uint64_t awarp_matrix_nnz(const awarp_matrix* b) { return b == nullptr ? 0 : b->b.nnz(); }

awarp_status awarp_matrix_entry(const awarp_matrix* b, uint64_t index, awarp_entry* out) {
  return guard([&] {
    const auto& e = need(b, "matrix").b.entries;
    if (index >= e.size()) throw awarp::Error(awarp::ErrorKind::OutOfRange, "entry index");
    const awarp::WarpEntry& x = e[index];
    need(out, "out") = {x.l, x.m, x.i, x.j, x.weight};
  });
}

awarp_status awarp_matrix_dst_frame(const awarp_matrix* b, awarp_frame* out) {
  return guard([&] { need(out, "out") = from_frame(need(b, "matrix").b.dst_frame); });
}

awarp_status awarp_matrix_write(const awarp_matrix* b, const char* path) {
  return guard([&] { awarp::write_matrix(need(b, "matrix").b, &need(path, "path")); });
}

awarp_status awarp_matrix_read(const char* path, awarp_matrix** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    *out = new awarp_matrix{awarp::read_matrix(&need(path, "path"))};
  });
}

awarp_status awarp_matrix_set_frames(awarp_matrix* b, const awarp_frame* src,
                                     const awarp_frame* dst) {
  return guard([&] {
    awarp::WarpMatrix& m = need(b, "matrix").b;
    const awarp::GridFrame s = to_frame(src);
    const awarp::GridFrame d = to_frame(dst);
    if (s.nx != m.src_frame.nx || s.ny != m.src_frame.ny || d.nx != m.dst_frame.nx ||
        d.ny != m.dst_frame.ny) {
      throw awarp::Error(awarp::ErrorKind::InvalidArgument, "set_frames: size mismatch");
    }
    m.src_frame = s;
    m.dst_frame = d;
  });
}

awarp_status awarp_matrix_apply(const awarp_matrix* b, const awarp_image* src, unsigned threads,
                                awarp_image** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    emit_image(awarp::apply(need(b, "matrix").b, need(src, "src").img, threads), out);
  });
}

awarp_status awarp_matrix_report(const awarp_matrix* b, const awarp_map* map,
                                 const awarp_image* src, const awarp_image* dst,
                                 awarp_report* out) {
  return guard([&] {
    const awarp::CoordinateMap none;
    const awarp::WarpReport r = awarp::report(need(b, "matrix").b, map ? map->map : none,
                                              need(src, "src").img, need(dst, "dst").img);
    need(out, "out") = {r.delta,
                        r.column_sum_min,
                        r.column_sum_max,
                        r.fully_covered_columns,
                        r.row_sum_median_rel_error,
                        r.row_sum_samples,
                        r.nnz,
                        r.skipped_degenerate,
                        r.lost_fraction};
  });
}

awarp_status awarp_resample_bilinear(const awarp_map* map, const awarp_image* src,
                                     const awarp_frame* dst, unsigned threads,
                                     awarp_image** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    emit_image(awarp::resample_bilinear(need(map, "map").map, need(src, "src").img,
                                        to_frame(dst), threads),
               out);
  });
}

void awarp_selftest_options_init(awarp_selftest_options* opts) {
  if (opts == nullptr) return;
  const awarp::oracle::SelftestOptions d;
  *opts = {d.random_pairs, d.mc_samples, d.seed, d.threads};
}

awarp_status awarp_selftest_run(const awarp_selftest_options* opts, awarp_case_callback on_case,
                                void* user, awarp_selftest_summary* out) {
  return guard([&] {
    awarp::oracle::SelftestOptions o;
    if (opts != nullptr) {
      o.random_pairs = opts->random_pairs;
      o.mc_samples = opts->mc_samples;
      o.seed = opts->seed;
      o.threads = opts->threads;
    }
    if (o.mc_samples == 0) {
      throw awarp::Error(awarp::ErrorKind::InvalidArgument, "selftest: mc_samples must be >= 1");
    }
    std::function<void(const awarp::oracle::CaseResult&)> cb;
    if (on_case != nullptr) {
      cb = [on_case, user](const awarp::oracle::CaseResult& r) {
        const awarp_case_result c{r.group.c_str(), r.label.c_str(), r.area,
                                  r.clip_area,     r.mc_area,       r.mc_stderr,
                                  r.symmetric,     r.clip_ok,       r.mc_ok};
        on_case(&c, user);
      };
    }
    const auto s = awarp::oracle::run_selftest(o, cb);
    need(out, "out") = {s.topological_total, s.topological_passed, s.degenerate_total,
                        s.degenerate_passed,  s.random_total,       s.random_passed};
  });
}

void awarp_photometry_config_init(awarp_photometry_config* cfg) {
  if (cfg == nullptr) return;
  const awarp::PhotometryConfig d;
  *cfg = {d.src_size, d.dst_size, d.sources, d.sigma, d.min_sep, d.margin, d.seed,
          d.estimator.radius_sigmas, d.estimator.threads};
}

awarp_status awarp_photometry_run(const awarp_photometry_config* cfg, const awarp_map* map,
                                  awarp_photometry** out) {
  return guard([&] {
    need(out, "out") = nullptr;
    const awarp_photometry_config& c = need(cfg, "cfg");
    awarp::PhotometryConfig p;
    p.src_size = c.src_size;
    p.dst_size = c.dst_size;
    p.sources = c.sources;
    p.sigma = c.sigma;
    p.min_sep = c.min_sep;
    p.margin = c.margin;
    p.seed = c.seed;
    p.estimator.radius_sigmas = c.radius_sigmas;
    p.estimator.threads = c.threads;
    *out = new awarp_photometry{awarp::run_photometry(p, need(map, "map").map)};
  });
}

void awarp_photometry_free(awarp_photometry* run) { delete run; }

size_t awarp_photometry_source_count(const awarp_photometry* run) {
  return run == nullptr ? 0 : run->run.field.centers.size();
}

size_t awarp_photometry_method_count(void) { return awarp::kAllEstimators.size(); }

const char* awarp_photometry_method_name(size_t method) {
  if (method >= awarp::kAllEstimators.size()) return nullptr;
  return awarp::to_string(awarp::kAllEstimators[method]).data();
}

awarp_status awarp_photometry_source(const awarp_photometry* run, size_t k,
                                     awarp_source_info* out) {
  return guard([&] {
    const awarp::PhotometryRun& r = need(run, "run").run;
    if (k >= r.field.centers.size()) {
      throw awarp::Error(awarp::ErrorKind::OutOfRange, "photometry source index");
    }
    need(out, "out") = {r.field.centers[k].x, r.field.centers[k].y, r.mapped_centers[k].x,
                        r.mapped_centers[k].y, r.grad_j[k]};
  });
}

awarp_status awarp_photometry_value(const awarp_photometry* run, size_t method, size_t k,
                                    double* out) {
  return guard([&] {
    const auto& s = method_result(run, method).s_tilde;
    if (k >= s.size()) throw awarp::Error(awarp::ErrorKind::OutOfRange, "photometry source index");
    need(out, "out") = s[k];
  });
}

awarp_status awarp_photometry_epsilon(const awarp_photometry* run, size_t method, double* out) {
  return guard([&] { need(out, "out") = method_result(run, method).epsilon; });
}

awarp_status awarp_photometry_spearman(const awarp_photometry* run, size_t method,
                                       double* out) {
  return guard([&] {
    const auto& s = method_result(run, method).s_tilde;
    std::vector<double> err;
    err.reserve(s.size());
    for (double v : s) err.push_back(std::abs(v - 1.0));
    need(out, "out") = awarp::spearman(err, run->run.grad_j);
  });
}

awarp_status awarp_photometry_write_csv(const awarp_photometry* run, const char* path) {
  return guard([&] {
    const awarp_photometry& r = need(run, "run");
    std::ofstream f(&need(path, "path"), std::ios::binary | std::ios::trunc);
    if (!f) throw awarp::Error(awarp::ErrorKind::Io, std::string("cannot create ") + path);
    awarp::write_photometry_csv(r.run, f);
    if (!f) throw awarp::Error(awarp::ErrorKind::Io, std::string("write failed: ") + path);
  });
}

}  // extern "C"
