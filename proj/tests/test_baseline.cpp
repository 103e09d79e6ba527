// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <random>

#include "awarp/baseline.hpp"
#include "awarp/error.hpp"
#include "awarp/mapping.hpp"
#include "awarp/patterns.hpp"
#include "awarp/warp.hpp"
#include "doctest.h"

using namespace awarp;

TEST_CASE("identity resampling") {
  IntensityImage img(GridFrame::unit(12, 9), 1);
  std::mt19937_64 g(1);
  for (double& v : img.values()) v = static_cast<double>(g() % 256);
  const IntensityImage out = resample_bilinear(map_identity(), img, img.frame());
  for (std::size_t k = 0; k < img.values().size(); ++k) {
    CHECK(out.values()[k] == doctest::Approx(img.values()[k]).epsilon(1e-14));
  }
}

TEST_CASE("bilinear images are reproduced") {
  const GridFrame src = GridFrame::unit(20, 16);
  IntensityImage img(src, 1);
  for (std::int64_t j = 0; j < src.ny; ++j) {
    for (std::int64_t i = 0; i < src.nx; ++i) {
      img.at(i, j) = 2 * src.center_x(i) + 3 * src.center_y(j);
    }
  }
  const GridFrame dst = GridFrame::unit(37, 23);
  const IntensityImage out = resample_bilinear(map_identity(), img, dst);
  for (std::int64_t m = 0; m < dst.ny; ++m) {
    for (std::int64_t l = 0; l < dst.nx; ++l) {
      const double x = dst.center_x(l);
      const double y = dst.center_y(m);
      if (x < src.center_x(0) || x > src.center_x(src.nx - 1) || y < src.center_y(0) ||
          y > src.center_y(src.ny - 1)) {
        continue;
      }
      CHECK(out.at(l, m) == doctest::Approx(2 * x + 3 * y).epsilon(1e-13));
    }
  }
}

TEST_CASE("output stays within the source range") {
  IntensityImage img(GridFrame::unit(32, 32), 1);
  std::mt19937_64 g(2);
  for (double& v : img.values()) v = 10.0 + static_cast<double>(g() % 100);
  const IntensityImage out = resample_bilinear(map_sin(), img, GridFrame::unit(45, 45));
  for (double v : out.values()) CHECK((v >= 10.0 && v <= 109.0));
}

TEST_CASE("lookups outside the source give zero") {
  IntensityImage img(GridFrame::unit(8, 8), 1, std::vector<double>(64, 5.0));
  const IntensityImage out = resample_bilinear(map_translate(0.5, 0.0), img, img.frame());
  for (std::int64_t m = 0; m < 8; ++m) {
    for (std::int64_t l = 0; l < 8; ++l) CHECK(out.at(l, m) == (l < 4 ? 0.0 : 5.0));
  }
  auto singular = [](Point2) -> Point2 { throw Error(ErrorKind::Singular, "x"); };
  const IntensityImage none = resample_bilinear(singular, img, img.frame());
  for (double v : none.values()) CHECK(v == 0.0);
}

TEST_CASE("maps without inverse are rejected") {
  IntensityImage img(GridFrame::unit(4, 4), 1);
  CHECK_THROWS_AS(resample_bilinear(map_wavy(), img, img.frame()), Error);
}

TEST_CASE("checker through perspective aliases more than the area warp") {
  const CoordinateMap map = map_perspective();
  const IntensityImage checker = make_checker(128, 64, 2);
  const Box box = mapped_bounding_box(map, checker.frame());
  const GridFrame dst = GridFrame::over_box(box.xmin, box.ymin, box.xmax, box.ymax, 100, 100);
  const IntensityImage area =
      apply(build_matrix(map, checker.frame(), dst, WeightingRule::WeightedArea), checker);
  const IntensityImage bil = resample_bilinear(map, checker, dst);
  // Fine-period region: rows near the viewer, where the squares are smallest.
  double a_area = 0.0;
  double a_bil = 0.0;
  for (std::int64_t row : {5, 10, 15, 20}) {
    a_area = std::max(a_area, dominant_alias_amplitude(area, row, 0, 100));
    a_bil = std::max(a_bil, dominant_alias_amplitude(bil, row, 0, 100));
  }
  CHECK(a_area < a_bil);
}

TEST_CASE("threads do not change the result") {
  IntensityImage img(GridFrame::unit(50, 40), 1);
  std::mt19937_64 g(3);
  for (double& v : img.values()) v = static_cast<double>(g() % 256);
  const IntensityImage a = resample_bilinear(map_sin(), img, GridFrame::unit(61, 33), 1);
  const IntensityImage b = resample_bilinear(map_sin(), img, GridFrame::unit(61, 33), 5);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}
