// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "awarp/error.hpp"
#include "awarp/mapping.hpp"
#include "awarp/warp.hpp"
#include "doctest.h"

using namespace awarp;
namespace fs = std::filesystem;

namespace {

constexpr WeightingRule kRules[] = {WeightingRule::Hemipixel, WeightingRule::PixelUniform,
                                    WeightingRule::WeightedArea};

IntensityImage random_image(std::int64_t nx, std::int64_t ny, std::uint64_t seed,
                            std::size_t channels = 1) {
  IntensityImage img(GridFrame::unit(nx, ny), channels);
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  for (double& v : img.values()) v = u(g);
  return img;
}

GridFrame fitted(const CoordinateMap& map, const GridFrame& src, std::int64_t nx,
                 std::int64_t ny) {
  const Box b = mapped_bounding_box(map, src);
  return GridFrame::over_box(b.xmin, b.ymin, b.xmax, b.ymax, nx, ny);
}

double delta(const IntensityImage& a, const IntensityImage& b) {
  const double s = total_intensity(a)[0];
  return (s - total_intensity(b)[0]) / s;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("awarp_warp_" + name);
}

}  // namespace

TEST_CASE("rule names") {
  CHECK(parse_weighting_rule("hemi") == WeightingRule::Hemipixel);
  CHECK(parse_weighting_rule("PixelUniform") == WeightingRule::PixelUniform);
  CHECK(parse_weighting_rule("AREA") == WeightingRule::WeightedArea);
  CHECK_THROWS_AS(parse_weighting_rule("bilinear"), Error);
  for (WeightingRule r : kRules) CHECK(parse_weighting_rule(to_string(r)) == r);
}

TEST_CASE("identity map gives the identity matrix") {
  const GridFrame f = GridFrame::unit(16, 12);
  for (WeightingRule rule : kRules) {
    const WarpMatrix b = build_matrix(map_identity(), f, f, rule);
    REQUIRE(b.nnz() == 16 * 12);
    for (const WarpEntry& e : b.entries) {
      CHECK(e.l == e.i);
      CHECK(e.m == e.j);
      CHECK(std::abs(e.weight - 1.0) <= 1e-14);
    }
    const IntensityImage img = random_image(16, 12, 1);
    const IntensityImage out = apply(b, img);
    for (std::size_t k = 0; k < img.values().size(); ++k) {
      CHECK(std::abs(out.values()[k] - img.values()[k]) <= 1e-12 * img.values()[k]);
    }
  }
}

TEST_CASE("integer translation gives a partial permutation") {
  const GridFrame f = GridFrame::unit(20, 20);
  for (WeightingRule rule : kRules) {
    const WarpMatrix b = build_matrix(map_translate(-4.0 / 20, 7.0 / 20), f, f, rule);
    CHECK(b.nnz() == 16 * 13);
    std::vector<int> per_row(400, 0);
    std::vector<int> per_col(400, 0);
    for (const WarpEntry& e : b.entries) {
      CHECK(e.l + 4 == e.i);
      CHECK(e.m == e.j + 7);
      CHECK(std::abs(e.weight - 1.0) <= 1e-12);
      CHECK(++per_row[e.m * 20 + e.l] == 1);
      CHECK(++per_col[e.j * 20 + e.i] == 1);
    }
  }
}

TEST_CASE("2x2 to 1x1 aggregation") {
  const GridFrame src = GridFrame::unit(2, 2);
  const GridFrame dst = GridFrame::unit(1, 1);
  const IntensityImage img(src, 1, {1, 2, 3, 4});
  for (WeightingRule rule : kRules) {
    const WarpMatrix b = build_matrix(map_identity(), src, dst, rule);
    REQUIRE(b.nnz() == 4);
    const double want = rule == WeightingRule::WeightedArea ? 0.25 : 1.0;
    for (const WarpEntry& e : b.entries) CHECK(e.weight == doctest::Approx(want).epsilon(1e-14));
    const double out = apply(b, img).at(0, 0);
    CHECK(out == doctest::Approx(rule == WeightingRule::WeightedArea ? 2.5 : 10.0).epsilon(1e-14));
  }
}

TEST_CASE("weighted area reproduces covered source values") {
  const GridFrame src = GridFrame::unit(4, 4);
  const GridFrame dst = GridFrame::unit(16, 16);
  const IntensityImage img = random_image(4, 4, 2);
  const IntensityImage out =
      apply(build_matrix(map_identity(), src, dst, WeightingRule::WeightedArea), img);
  for (std::int64_t m = 0; m < 16; ++m) {
    for (std::int64_t l = 0; l < 16; ++l) {
      CHECK(out.at(l, m) == doctest::Approx(img.at(l / 4, m / 4)).epsilon(1e-14));
    }
  }
}

TEST_CASE("sin map nonzero count") {
  const WarpMatrix b = build_matrix(map_sin(), GridFrame::unit(64, 64), GridFrame::unit(100, 100),
                                    WeightingRule::WeightedArea);
  CHECK(b.nnz() == 26244);
}

TEST_CASE("conservation and column sums") {
  const IntensityImage img = random_image(96, 96, 3);
  for (const CoordinateMap& map : {map_wavy(), map_sin(), map_perspective()}) {
    for (WeightingRule rule : {WeightingRule::Hemipixel, WeightingRule::PixelUniform}) {
      const GridFrame dst = fitted(map, img.frame(), 53, 71);
      const WarpMatrix b = build_matrix(map, img.frame(), dst, rule);
      const IntensityImage out = apply(b, img);
      CHECK(std::abs(delta(img, out)) <= 1e-12);
      const WarpReport r = report(b, map, img, out);
      CHECK(r.fully_covered_columns == 96 * 96);
      CHECK(std::abs(r.column_sum_min - 1.0) <= 1e-12);
      CHECK(std::abs(r.column_sum_max - 1.0) <= 1e-12);
      CHECK(r.lost_fraction <= 1e-12);
      CHECK(r.nnz == b.nnz());
    }
  }
}

TEST_CASE("identity report") {
  const IntensityImage img = random_image(10, 10, 4);
  const WarpMatrix b = build_matrix(map_identity(), img.frame(), img.frame(),
                                    WeightingRule::PixelUniform);
  const WarpReport r = report(b, map_identity(), img, apply(b, img));
  CHECK(r.delta == 0.0);
  CHECK(r.skipped_degenerate == 0);
}

TEST_CASE("linearity and non-negativity") {
  const CoordinateMap map = map_wavy();
  const IntensityImage a = random_image(40, 40, 5);
  const IntensityImage c = random_image(40, 40, 6);
  const GridFrame dst = fitted(map, a.frame(), 33, 29);
  for (WeightingRule rule : kRules) {
    const WarpMatrix b = build_matrix(map, a.frame(), dst, rule);
    IntensityImage mix(a.frame(), 1);
    for (std::size_t k = 0; k < mix.values().size(); ++k) {
      mix.values()[k] = 2.5 * a.values()[k] - 0.75 * c.values()[k];
    }
    const IntensityImage oa = apply(b, a);
    const IntensityImage oc = apply(b, c);
    const IntensityImage om = apply(b, mix);
    for (std::size_t k = 0; k < om.values().size(); ++k) {
      const double want = 2.5 * oa.values()[k] - 0.75 * oc.values()[k];
      CHECK(std::abs(om.values()[k] - want) <= 1e-12 * (2.5 * oa.values()[k] + 0.75 * oc.values()[k]) + 1e-300);
      CHECK(oa.values()[k] >= 0.0);
    }
    for (const WarpEntry& e : b.entries) CHECK(e.weight > 0.0);
  }
}

TEST_CASE("multichannel images warp per channel") {
  const IntensityImage rgb = random_image(24, 24, 7, 3);
  const WarpMatrix b = build_matrix(map_sin(), rgb.frame(), GridFrame::unit(17, 19),
                                    WeightingRule::PixelUniform);
  const IntensityImage out = apply(b, rgb);
  for (std::size_t c = 0; c < 3; ++c) {
    IntensityImage one(rgb.frame(), 1);
    for (std::size_t k = 0; k < one.values().size(); ++k) one.values()[k] = rgb.values()[3 * k + c];
    const IntensityImage single = apply(b, one);
    for (std::size_t k = 0; k < single.values().size(); ++k) {
      CHECK(single.values()[k] == out.values()[3 * k + c]);
    }
  }
}

TEST_CASE("apply rejects mismatched images") {
  const WarpMatrix b = build_matrix(map_identity(), GridFrame::unit(4, 4), GridFrame::unit(4, 4),
                                    WeightingRule::Hemipixel);
  CHECK_THROWS_AS(apply(b, IntensityImage(GridFrame::unit(5, 4), 1)), Error);
}

TEST_CASE("row sums approach the scaled inverse Jacobian") {
  auto median_error = [](std::int64_t n) {
    const CoordinateMap map = map_sin();
    const GridFrame f = GridFrame::unit(n, n);
    const IntensityImage img(f, 1, std::vector<double>(static_cast<std::size_t>(n * n), 1.0));
    const WarpMatrix b = build_matrix(map, f, f, WeightingRule::PixelUniform);
    const WarpReport r = report(b, map, img, apply(b, img));
    CHECK(r.row_sum_samples > 0);
    return r.row_sum_median_rel_error;
  };
  const double e256 = median_error(256);
  const double e512 = median_error(512);
  CHECK(e512 < e256);
}

TEST_CASE("builds are independent of the thread count") {
  const CoordinateMap map = map_wavy();
  const IntensityImage img = random_image(64, 64, 8);
  const GridFrame dst = GridFrame::unit(50, 50);
  BuildOptions one;
  one.threads = 1;
  const WarpMatrix ref = build_matrix(map, img.frame(), dst, WeightingRule::PixelUniform, one);
  const IntensityImage ref_out = apply(ref, img, 1);
  for (unsigned t : {2u, 3u, 7u}) {
    BuildOptions o;
    o.threads = t;
    const WarpMatrix b = build_matrix(map, img.frame(), dst, WeightingRule::PixelUniform, o);
    CHECK(b.entries == ref.entries);
    const IntensityImage out = apply(b, img, t);
    CHECK(std::memcmp(out.values().data(), ref_out.values().data(), out.values().size_bytes()) == 0);
  }
}

TEST_CASE("degenerate mapped hemipixels") {
  CoordinateMap collapse;
  collapse.name = "collapse";
  collapse.forward = [](Point2) { return Point2{0.35, 0.65}; };
  const IntensityImage img = random_image(6, 5, 9);
  const GridFrame dst = GridFrame::unit(10, 10);
  SUBCASE("share lands on the centroid pixel") {
    for (WeightingRule rule : {WeightingRule::Hemipixel, WeightingRule::PixelUniform}) {
      const WarpMatrix b = build_matrix(collapse, img.frame(), dst, rule);
      CHECK(b.skipped_degenerate == 2 * 6 * 5);
      for (const WarpEntry& e : b.entries) {
        CHECK(e.l == 3);
        CHECK(e.m == 6);
      }
      CHECK(std::abs(delta(img, apply(b, img))) <= 1e-12);
    }
  }
  SUBCASE("off-raster share is lost") {
    CoordinateMap away = collapse;
    away.forward = [](Point2) { return Point2{5.0, 5.0}; };
    const WarpMatrix b = build_matrix(away, img.frame(), dst, WeightingRule::PixelUniform);
    CHECK(b.nnz() == 0);
    CHECK(delta(img, apply(b, img)) == 1.0);
  }
}

TEST_CASE("partially covered raster reports loss") {
  const IntensityImage img = random_image(20, 20, 10);
  const WarpMatrix b = build_matrix(map_translate(0.5, 0.0), img.frame(), img.frame(),
                                    WeightingRule::PixelUniform);
  CHECK(b.lost_fraction() == doctest::Approx(0.5));
  const WarpReport r = report(b, map_translate(0.5, 0.0), img, apply(b, img));
  CHECK(r.fully_covered_columns == 10 * 20);
  CHECK(r.delta > 0.0);
}

TEST_CASE("singular map evaluation fails the build") {
  const CoordinateMap m = map_perspective(0.25, 0.5, 0.5, 0.0);
  try {
    (void)build_matrix(m, GridFrame::unit(8, 8), GridFrame::unit(8, 8), WeightingRule::Hemipixel);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Singular);
  }
}

TEST_CASE("AWM1 files") {
  SUBCASE("round trip") {
    const WarpMatrix b = build_matrix(map_wavy(), GridFrame::unit(20, 20), GridFrame::unit(15, 17),
                                      WeightingRule::Hemipixel);
    const fs::path p = temp_path("rt.awm");
    write_matrix(b, p);
    const WarpMatrix back = read_matrix(p);
    CHECK(back.entries == b.entries);
    CHECK(back.dst_frame.nx == 15);
    CHECK(back.src_frame.ny == 20);
    fs::remove(p);
  }
  SUBCASE("empty matrix") {
    WarpMatrix b;
    b.dst_frame = GridFrame::unit(3, 2);
    b.src_frame = GridFrame::unit(4, 5);
    const fs::path p = temp_path("empty.awm");
    write_matrix(b, p);
    CHECK(read_matrix(p).nnz() == 0);
    fs::remove(p);
  }
  SUBCASE("golden fixture") {
    const fs::path p = temp_path("one.awm");
    std::ofstream(p) << "AWM1 2 3 4 5 1\n1 2 3 4 2.5000000000000000e-01\n";
    const WarpMatrix b = read_matrix(p);
    REQUIRE(b.nnz() == 1);
    CHECK(b.entries[0] == WarpEntry{1, 2, 3, 4, 0.25});
    CHECK(b.dst_frame.nx == 2);
    CHECK(b.dst_frame.ny == 3);
    CHECK(b.src_frame.nx == 4);
    CHECK(b.src_frame.ny == 5);
    write_matrix(b, p);
    std::ifstream in(p);
    const std::string text{std::istreambuf_iterator<char>(in), {}};
    CHECK(text == "AWM1 2 3 4 5 1\n1 2 3 4 2.5000000000000000e-01\n");
    fs::remove(p);
  }
  SUBCASE("malformed files") {
    const fs::path p = temp_path("bad.awm");
    for (const char* text : {"AWM2 1 1 1 1 0\n", "AWM1 1 1 1 1 1\n", "AWM1 1 1 1 1 1\n0 0 1 0 1\n",
                             "AWM1 2 1 1 1 2\n1 0 0 0 1\n0 0 0 0 1\n",
                             "AWM1 2 1 1 1 2\n0 0 0 0 1\n0 0 0 0 1\n",
                             "AWM1 1 1 1 1 1\n0 0 0 0 -1\n", "AWM1 1 1 1 1 1\n0 0 0 0 nan\n"}) {
      std::ofstream(p) << text;
      CHECK_THROWS_AS(read_matrix(p), Error);
    }
    fs::remove(p);
  }
}
