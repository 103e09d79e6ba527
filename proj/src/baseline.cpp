// SPDX-License-Identifier: Apache-2.0
#include "awarp/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "awarp/error.hpp"
#include "awarp/parallel.hpp"

namespace awarp {

IntensityImage resample_bilinear(const std::function<Point2(Point2)>& inverse,
                                 const IntensityImage& src, const GridFrame& dst,
                                 unsigned threads) {
  if (!inverse) throw Error(ErrorKind::InvalidArgument, "resample: no inverse map");
  dst.validate();
  const GridFrame& sf = src.frame();
  const std::size_t ch = src.channels();
  IntensityImage out(dst, ch);
  const auto in = src.values();
  auto ov = out.values();

  parallel_for_rows(dst.ny, resolve_threads(threads), [&](std::int64_t m0, std::int64_t m1) {
    for (std::int64_t m = m0; m < m1; ++m) {
      for (std::int64_t l = 0; l < dst.nx; ++l) {
        Point2 p;
        try {
          p = inverse({dst.center_x(l), dst.center_y(m)});
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::Singular) throw;
          continue;
        }
        if (!(p.x >= sf.x0 && p.x <= sf.x_end() && p.y >= sf.y0 && p.y <= sf.y_end())) continue;

        const double fx = (p.x - sf.x0) / sf.dx - 0.5;
        const double fy = (p.y - sf.y0) / sf.dy - 0.5;
        const double ix = std::floor(fx);
        const double iy = std::floor(fy);
        const double tx = fx - ix;
        const double ty = fy - iy;
        auto clamp_x = [&sf](double v) {
          return static_cast<std::size_t>(std::clamp<double>(v, 0.0, static_cast<double>(sf.nx - 1)));
        };
        auto clamp_y = [&sf](double v) {
          return static_cast<std::size_t>(std::clamp<double>(v, 0.0, static_cast<double>(sf.ny - 1)));
        };
        const std::size_t i0 = clamp_x(ix);
        const std::size_t i1 = clamp_x(ix + 1.0);
        const std::size_t j0 = clamp_y(iy);
        const std::size_t j1 = clamp_y(iy + 1.0);
        const auto nx = static_cast<std::size_t>(sf.nx);
        const std::size_t o = (static_cast<std::size_t>(m) * static_cast<std::size_t>(dst.nx) +
                               static_cast<std::size_t>(l)) *
                              ch;
        for (std::size_t c = 0; c < ch; ++c) {
          const double v00 = in[(j0 * nx + i0) * ch + c];
          const double v10 = in[(j0 * nx + i1) * ch + c];
          const double v01 = in[(j1 * nx + i0) * ch + c];
          const double v11 = in[(j1 * nx + i1) * ch + c];
          ov[o + c] = (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11);
        }
      }
    }
  });
  return out;
}

IntensityImage resample_bilinear(const CoordinateMap& map, const IntensityImage& src,
                                 const GridFrame& dst, unsigned threads) {
  if (!map.has_inverse()) {
    throw Error(ErrorKind::InvalidArgument, map.name + ": map has no analytic inverse");
  }
  return resample_bilinear(map.inverse, src, dst, threads);
}

}  // namespace awarp
