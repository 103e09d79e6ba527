// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the library only through awarp.h.

#include <awarp/awarp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3, kNumeric = 4 };

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_of(awarp_status s) {
  switch (s) {
    case AWARP_OK:
      return kOk;
    case AWARP_E_INVALID_ARGUMENT:
    case AWARP_E_OUT_OF_RANGE:
      return kUsage;
    case AWARP_E_IO:
    case AWARP_E_FORMAT:
      return kIo;
    case AWARP_E_DEGENERATE:
    case AWARP_E_NO_CROSSING:
    case AWARP_E_SINGULAR:
      return kNumeric;
    case AWARP_E_INTERNAL:
      break;
  }
  return kFailed;
}

void check(awarp_status s) {
  if (s != AWARP_OK) {
    throw CliError{exit_code_of(s), std::string(awarp_status_name(s)) + ": " + awarp_last_error()};
  }
}

[[noreturn]] void usage(const std::string& msg) { throw CliError{kUsage, msg}; }

struct MapDel {
  void operator()(awarp_map* p) const { awarp_map_free(p); }
};
struct ImageDel {
  void operator()(awarp_image* p) const { awarp_image_free(p); }
};
struct MatrixDel {
  void operator()(awarp_matrix* p) const { awarp_matrix_free(p); }
};
struct PhotDel {
  void operator()(awarp_photometry* p) const { awarp_photometry_free(p); }
};
using MapPtr = std::unique_ptr<awarp_map, MapDel>;
using ImagePtr = std::unique_ptr<awarp_image, ImageDel>;
using MatrixPtr = std::unique_ptr<awarp_matrix, MatrixDel>;
using PhotPtr = std::unique_ptr<awarp_photometry, PhotDel>;

MapPtr parse_map(const std::string& spec) {
  awarp_map* m = nullptr;
  check(awarp_map_parse(spec.c_str(), &m));
  return MapPtr(m);
}

ImagePtr read_image(const std::string& path) {
  awarp_image* img = nullptr;
  check(awarp_image_read(path.c_str(), &img));
  return ImagePtr(img);
}

struct Size {
  std::int64_t w = 0;
  std::int64_t h = 0;
};

Size parse_size(const std::string& text) {
  Size s;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> s.w >> x >> s.h) || (x != 'x' && x != 'X') || !in.eof() || s.w < 1 || s.h < 1) {
    usage("bad --size '" + text + "', expected WxH");
  }
  return s;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// "unit" (default), "fit" (bounding box of the mapped source) or
// "x0,y0,x1,y1".
awarp_frame destination_frame(const std::string& box, const awarp_map* map,
                              const awarp_frame& src, Size size) {
  double b[4] = {0.0, 0.0, 1.0, 1.0};
  if (box == "fit") {
    if (map == nullptr) usage("--dst-box fit needs --map");
    check(awarp_map_bounding_box(map, &src, b));
  } else if (box != "unit") {
    std::istringstream in(box);
    char c1 = 0;
    char c2 = 0;
    char c3 = 0;
    if (!(in >> b[0] >> c1 >> b[1] >> c2 >> b[2] >> c3 >> b[3]) || c1 != ',' || c2 != ',' ||
        c3 != ',' || !in.eof()) {
      usage("bad --dst-box '" + box + "', expected unit, fit or x0,y0,x1,y1");
    }
  }
  awarp_frame f;
  check(awarp_frame_over_box(b[0], b[1], b[2], b[3], size.w, size.h, &f));
  return f;
}

awarp_image_format parse_format(const std::string& s) {
  if (s == "auto") return AWARP_FORMAT_AUTO;
  if (s == "awf1") return AWARP_FORMAT_AWF1;
  if (s == "pgm8") return AWARP_FORMAT_PGM8;
  if (s == "pgm16") return AWARP_FORMAT_PGM16;
  usage("unknown --format '" + s + "'");
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

// pattern ------------------------------------------------------------------

struct PatternArgs {
  std::string kind;
  std::string size;
  std::int64_t cell = 2;
  std::string out;
  std::string format = "auto";
  std::size_t count = 40;
  double sigma = 0.01;
  double min_sep = 0.0;
  double margin = 0.0;
  std::uint64_t seed = 42;
};

int cmd_pattern(const PatternArgs& a) {
  awarp_image* img = nullptr;
  if (a.kind == "checker") {
    const Size s = parse_size(a.size.empty() ? "128x64" : a.size);
    check(awarp_pattern_checker(s.w, s.h, a.cell, &img));
  } else if (a.kind == "bars") {
    const Size s = parse_size(a.size.empty() ? "512x100" : a.size);
    check(awarp_pattern_bars(s.w, s.h, &img));
  } else {
    if (!(a.sigma > 0.0)) usage("--sigma must be > 0");
    const Size s = parse_size(a.size.empty() ? "400x400" : a.size);
    check(awarp_pattern_sources(s.w, s.h, a.count, a.sigma, a.min_sep, a.margin, a.seed, &img));
  }
  const ImagePtr hold(img);
  check(awarp_image_write(img, a.out.c_str(), parse_format(a.format)));
  return kOk;
}

// warp ---------------------------------------------------------------------

struct WarpArgs {
  std::string in;
  std::string out;
  std::string map;
  std::string size;
  std::string rule = "pixel";
  std::string report;
  std::string matrix_out;
  std::string matrix_in;
  std::string dst_box = "unit";
  std::string format = "auto";
  unsigned threads = 0;
  double dup = 1e-9;
  double prune = 1e-300;
};

int cmd_warp(const WarpArgs& a) {
  if (a.map.empty() && a.matrix_in.empty()) usage("warp needs --map or --matrix-in");
  const MapPtr map = a.map.empty() ? nullptr : parse_map(a.map);
  awarp_rule rule;
  check(awarp_rule_parse(a.rule.c_str(), &rule));
  const ImagePtr src = read_image(a.in);
  awarp_frame sf;
  check(awarp_image_frame(src.get(), &sf));
  const Size size = parse_size(a.size);
  const awarp_frame df = destination_frame(a.dst_box, map.get(), sf, size);

  auto t0 = std::chrono::steady_clock::now();
  awarp_matrix* raw = nullptr;
  if (!a.matrix_in.empty()) {
    check(awarp_matrix_read(a.matrix_in.c_str(), &raw));
    MatrixPtr hold(raw);
    check(awarp_matrix_set_frames(raw, &sf, &df));
    raw = hold.release();
  } else {
    awarp_build_options opts;
    awarp_build_options_init(&opts);
    opts.threads = a.threads;
    opts.dup_factor = a.dup;
    opts.prune_threshold = a.prune;
    check(awarp_matrix_build(map.get(), &sf, &df, rule, &opts, &raw));
  }
  const MatrixPtr b(raw);
  const double build_ms = elapsed_ms(t0);

  t0 = std::chrono::steady_clock::now();
  awarp_image* dst_raw = nullptr;
  check(awarp_matrix_apply(b.get(), src.get(), a.threads, &dst_raw));
  const ImagePtr dst(dst_raw);
  const double apply_ms = elapsed_ms(t0);

  check(awarp_image_write(dst.get(), a.out.c_str(), parse_format(a.format)));
  if (!a.matrix_out.empty()) check(awarp_matrix_write(b.get(), a.matrix_out.c_str()));

  awarp_report r;
  check(awarp_matrix_report(b.get(), map.get(), src.get(), dst.get(), &r));
  nlohmann::ordered_json j;
  j["delta"] = number_or_null(r.delta);
  j["nnz"] = r.nnz;
  j["colsum_min"] = number_or_null(r.colsum_min);
  j["colsum_max"] = number_or_null(r.colsum_max);
  j["lost_fraction"] = number_or_null(r.lost_fraction);
  j["skipped_degenerate"] = r.skipped_degenerate;
  j["build_ms"] = build_ms;
  j["apply_ms"] = apply_ms;
  const std::string text = j.dump(2) + "\n";
  if (a.report.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(a.report, std::ios::binary | std::ios::trunc);
    if (!(f << text)) throw CliError{kIo, "cannot write report " + a.report};
  }
  return kOk;
}

// resample -----------------------------------------------------------------

struct ResampleArgs {
  std::string in;
  std::string out;
  std::string map;
  std::string size;
  std::string dst_box = "unit";
  std::string format = "auto";
  unsigned threads = 0;
};

int cmd_resample(const ResampleArgs& a) {
  const MapPtr map = parse_map(a.map);
  if (!awarp_map_has_inverse(map.get())) usage("map '" + a.map + "' has no analytic inverse");
  const ImagePtr src = read_image(a.in);
  awarp_frame sf;
  check(awarp_image_frame(src.get(), &sf));
  const awarp_frame df = destination_frame(a.dst_box, map.get(), sf, parse_size(a.size));
  awarp_image* raw = nullptr;
  check(awarp_resample_bilinear(map.get(), src.get(), &df, a.threads, &raw));
  const ImagePtr dst(raw);
  check(awarp_image_write(dst.get(), a.out.c_str(), parse_format(a.format)));
  return kOk;
}

// selftest -----------------------------------------------------------------

struct SelftestArgs {
  std::size_t random_pairs = 10000;
  std::uint64_t mc_samples = 1000000;
  std::uint64_t seed = 20240917;
  unsigned threads = 0;
  bool quiet = false;
};

void print_case(const awarp_case_result* r, void* user) {
  const bool quiet = *static_cast<const bool*>(user);
  const bool ok = r->symmetric && r->clip_ok && r->mc_ok;
  if (quiet && ok) return;
  std::printf("%s %-11s %-20s area=%.17g clip=%.17g mc=%.6g+-%.2g%s%s%s\n", ok ? "PASS" : "FAIL",
              r->group, r->label, r->area, r->clip_area, r->mc_area, r->mc_stderr,
              r->symmetric ? "" : " asym", r->clip_ok ? "" : " clip-mismatch",
              r->mc_ok ? "" : " mc-mismatch");
}

int cmd_selftest(const SelftestArgs& a) {
  awarp_selftest_options o;
  awarp_selftest_options_init(&o);
  o.random_pairs = a.random_pairs;
  o.mc_samples = a.mc_samples;
  o.seed = a.seed;
  o.threads = a.threads;
  bool quiet = a.quiet;
  awarp_selftest_summary s;
  check(awarp_selftest_run(&o, print_case, &quiet, &s));
  std::printf("topological %zu/%zu\ndegenerate %zu/%zu\nrandom %zu/%zu\n", s.topological_passed,
              s.topological_total, s.degenerate_passed, s.degenerate_total, s.random_passed,
              s.random_total);
  const bool all = s.topological_passed == s.topological_total &&
                   s.degenerate_passed == s.degenerate_total && s.random_passed == s.random_total;
  std::printf("%s\n", all ? "selftest passed" : "selftest FAILED");
  return all ? kOk : kFailed;
}

// bench --------------------------------------------------------------------

struct BenchArgs {
  unsigned threads = 0;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  const MapPtr map = parse_map("sin()");
  std::ostringstream csv;
  csv << "src,dst,nnz,build_ms,apply_ms,resample_ms\n";
  for (auto [n1, n2] : {std::pair{64, 100}, {64, 1000}, {512, 100}, {512, 1000}}) {
    awarp_frame sf;
    awarp_frame df;
    check(awarp_frame_unit(n1, n1, &sf));
    check(awarp_frame_unit(n2, n2, &df));
    awarp_image* raw = nullptr;
    check(awarp_image_new(&sf, 1, &raw));
    const ImagePtr src(raw);
    double* v = awarp_image_data(src.get());
    for (std::int64_t k = 0; k < std::int64_t{n1} * n1; ++k) v[k] = static_cast<double>(k % 251);

    awarp_build_options opts;
    awarp_build_options_init(&opts);
    opts.threads = a.threads;
    auto t0 = std::chrono::steady_clock::now();
    awarp_matrix* braw = nullptr;
    check(awarp_matrix_build(map.get(), &sf, &df, AWARP_RULE_WEIGHTED_AREA, &opts, &braw));
    const MatrixPtr b(braw);
    const double build_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    check(awarp_matrix_apply(b.get(), src.get(), a.threads, &raw));
    ImagePtr warped(raw);
    const double apply_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    check(awarp_resample_bilinear(map.get(), src.get(), &df, a.threads, &raw));
    ImagePtr resampled(raw);
    const double resample_ms = elapsed_ms(t0);

    csv << n1 << 'x' << n1 << ',' << n2 << 'x' << n2 << ',' << awarp_matrix_nnz(b.get()) << ','
        << build_ms << ',' << apply_ms << ',' << resample_ms << '\n';
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!(f << csv.str())) throw CliError{kIo, "cannot write " + a.out};
  }
  return kOk;
}

// photometry ---------------------------------------------------------------

struct PhotometryArgs {
  std::string map = "sin()";
  std::int64_t src_size = 400;
  std::int64_t dst_size = 50;
  std::size_t count = 40;
  double sigma = 0.01;
  double min_sep = 0.0;
  double margin = 0.0;
  double radius = 4.0;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  std::string out;
};

int cmd_photometry(const PhotometryArgs& a) {
  if (!(a.sigma > 0.0)) usage("--sigma must be > 0");
  if (!(a.radius > 0.0)) usage("--radius must be > 0");
  const MapPtr map = parse_map(a.map);
  awarp_photometry_config cfg;
  awarp_photometry_config_init(&cfg);
  cfg.src_size = a.src_size;
  cfg.dst_size = a.dst_size;
  cfg.sources = a.count;
  cfg.sigma = a.sigma;
  cfg.min_sep = a.min_sep;
  cfg.margin = a.margin;
  cfg.seed = a.seed;
  cfg.radius_sigmas = a.radius;
  cfg.threads = a.threads;
  awarp_photometry* raw = nullptr;
  check(awarp_photometry_run(&cfg, map.get(), &raw));
  const PhotPtr run(raw);
  if (!a.out.empty()) check(awarp_photometry_write_csv(run.get(), a.out.c_str()));

  std::printf("%-22s %12s %12s\n", "method", "epsilon", "spearman");
  for (std::size_t m = 0; m < awarp_photometry_method_count(); ++m) {
    double eps = 0.0;
    double rho = 0.0;
    check(awarp_photometry_epsilon(run.get(), m, &eps));
    check(awarp_photometry_spearman(run.get(), m, &rho));
    std::printf("%-22s %12.6g %12.4g\n", awarp_photometry_method_name(m), eps, rho);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intensity-preserving image warping by triangulated area resampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(awarp_version()));

  PatternArgs pa;
  auto* pattern = app.add_subcommand("pattern", "Write a test pattern image");
  pattern->add_option("kind", pa.kind, "checker, bars or sources")
      ->required()
      ->check(CLI::IsMember({"checker", "bars", "sources"}));
  pattern->add_option("--size", pa.size, "WxH (defaults: checker 128x64, bars 512x100, sources 400x400)");
  pattern->add_option("--cell", pa.cell, "Checker square size in pixels")->check(CLI::PositiveNumber);
  pattern->add_option("--out", pa.out, "Output image")->required();
  pattern->add_option("--format", pa.format, "auto, awf1, pgm8 or pgm16");
  pattern->add_option("--count", pa.count, "Number of sources");
  pattern->add_option("--sigma", pa.sigma, "Source width");
  pattern->add_option("--min-sep", pa.min_sep, "Minimum source separation (default 10 sigma)");
  pattern->add_option("--margin", pa.margin, "Border margin (default 6 sigma)");
  pattern->add_option("--seed", pa.seed, "Random seed");

  WarpArgs wa;
  auto* warp = app.add_subcommand("warp", "Area-warp an image");
  warp->add_option("--in", wa.in, "Input image (PGM or AWF1)")->required();
  warp->add_option("--out", wa.out, "Output image")->required();
  warp->add_option("--map", wa.map, "Map spec, e.g. wavy() or perspective(a=0.25,b=-0.1,c=0.5,d=0)");
  warp->add_option("--size", wa.size, "Destination WxH")->required();
  warp->add_option("--rule", wa.rule, "hemi, pixel or area");
  warp->add_option("--report", wa.report, "JSON report path (default stdout)");
  warp->add_option("--matrix-out", wa.matrix_out, "Write the warp matrix (AWM1)");
  warp->add_option("--matrix-in", wa.matrix_in, "Use a stored warp matrix instead of building");
  warp->add_option("--dst-box", wa.dst_box, "unit, fit or x0,y0,x1,y1");
  warp->add_option("--format", wa.format, "auto, awf1, pgm8 or pgm16");
  warp->add_option("--threads", wa.threads, "Worker threads (0: all cores)");
  warp->add_option("--tolerance-dup", wa.dup, "Duplicate-vertex tolerance relative to triangle size")
      ->check(CLI::NonNegativeNumber);
  warp->add_option("--prune", wa.prune, "Drop weights at or below this value");

  ResampleArgs ra;
  auto* resample = app.add_subcommand("resample", "Bilinear inverse-lookup resampling");
  resample->add_option("--in", ra.in, "Input image")->required();
  resample->add_option("--out", ra.out, "Output image")->required();
  resample->add_option("--map", ra.map, "Map spec with an analytic inverse")->required();
  resample->add_option("--size", ra.size, "Destination WxH")->required();
  resample->add_option("--dst-box", ra.dst_box, "unit, fit or x0,y0,x1,y1");
  resample->add_option("--format", ra.format, "auto, awf1, pgm8 or pgm16");
  resample->add_option("--threads", ra.threads, "Worker threads (0: all cores)");

  SelftestArgs sa;
  auto* selftest = app.add_subcommand("selftest", "Check triangle overlap areas against oracles");
  selftest->add_option("--random-pairs", sa.random_pairs, "Random triangle pairs");
  selftest->add_option("--mc-samples", sa.mc_samples, "Monte Carlo samples per case")
      ->check(CLI::PositiveNumber);
  selftest->add_option("--seed", sa.seed, "Corpus and Monte Carlo seed");
  selftest->add_option("--threads", sa.threads, "Worker threads (0: all cores)");
  selftest->add_flag("--quiet", sa.quiet, "Print failures and the summary only");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Time the sin-map build/apply/resample configurations");
  bench->add_option("--threads", ba.threads, "Worker threads (0: all cores)");
  bench->add_option("--out", ba.out, "CSV path (default stdout)");

  PhotometryArgs pha;
  auto* phot = app.add_subcommand("photometry", "Synthetic-source photometry experiment");
  phot->add_option("--map", pha.map, "Map spec (needs inverse and inverse Jacobian)");
  phot->add_option("--src-size", pha.src_size, "Source raster side")->check(CLI::PositiveNumber);
  phot->add_option("--dst-size", pha.dst_size, "Destination raster side")->check(CLI::PositiveNumber);
  phot->add_option("--count", pha.count, "Number of sources");
  phot->add_option("--sigma", pha.sigma, "Source width");
  phot->add_option("--min-sep", pha.min_sep, "Minimum separation (default 10 sigma)");
  phot->add_option("--margin", pha.margin, "Border margin (default 6 sigma)");
  phot->add_option("--radius", pha.radius, "Aperture radius in sigmas");
  phot->add_option("--seed", pha.seed, "Random seed");
  phot->add_option("--threads", pha.threads, "Worker threads (0: all cores)");
  phot->add_option("--out", pha.out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*pattern) return cmd_pattern(pa);
    if (*warp) return cmd_warp(wa);
    if (*resample) return cmd_resample(ra);
    if (*selftest) return cmd_selftest(sa);
    if (*bench) return cmd_bench(ba);
    if (*phot) return cmd_photometry(pha);
  } catch (const CliError& e) {
    std::cerr << "awarp: " << e.message << '\n';
    return e.exit_code;
  }
  return kUsage;
}
