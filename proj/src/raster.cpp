// SPDX-License-Identifier: Apache-2.0
#include "awarp/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "awarp/error.hpp"

namespace awarp {

GridFrame GridFrame::over_box(double x0, double y0, double x1, double y1,
                              std::int64_t nx, std::int64_t ny) {
  if (nx < 1 || ny < 1) {
    throw Error(ErrorKind::InvalidArgument, "GridFrame: pixel counts must be >= 1");
  }
  GridFrame f{x0, y0, (x1 - x0) / static_cast<double>(nx),
              (y1 - y0) / static_cast<double>(ny), nx, ny};
  f.validate();
  return f;
}

GridFrame GridFrame::unit(std::int64_t nx, std::int64_t ny) {
  return over_box(0.0, 0.0, 1.0, 1.0, nx, ny);
}

void GridFrame::validate() const {
  if (nx < 1 || ny < 1) {
    throw Error(ErrorKind::InvalidArgument, "GridFrame: pixel counts must be >= 1");
  }
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy) ||
      !std::isfinite(x0) || !std::isfinite(y0)) {
    throw Error(ErrorKind::InvalidArgument, "GridFrame: spacing must be finite and > 0");
  }
}

Triangle2 hemipixel_triangle(const GridFrame& frame, const HemipixelId& id) {
  if (id.i < 0 || id.j < 0 || id.i >= frame.nx || id.j >= frame.ny) {
    throw Error(ErrorKind::OutOfRange, "hemipixel_triangle: index outside frame");
  }
  const double xa = frame.edge_x(id.i);
  const double xb = frame.edge_x(id.i + 1);
  const double ya = frame.edge_y(id.j);
  const double yb = frame.edge_y(id.j + 1);
  if (id.half == Half::Upper) return Triangle2{{{{xa, ya}, {xb, yb}, {xa, yb}}}};
  return Triangle2{{{{xa, ya}, {xb, ya}, {xb, yb}}}};
}

IndexWindow candidate_pixels(const GridFrame& frame, const Box& box) {
  IndexWindow w;
  if (box.xmax < frame.x0 || box.xmin > frame.x_end() || box.ymax < frame.y0 ||
      box.ymin > frame.y_end()) {
    return w;
  }
  auto index_of = [](double v, double origin, double step) {
    return static_cast<std::int64_t>(std::floor((v - origin) / step));
  };
  w.i0 = std::max<std::int64_t>(index_of(box.xmin, frame.x0, frame.dx) - 1, 0);
  w.i1 = std::min<std::int64_t>(index_of(box.xmax, frame.x0, frame.dx) + 1, frame.nx - 1);
  w.j0 = std::max<std::int64_t>(index_of(box.ymin, frame.y0, frame.dy) - 1, 0);
  w.j1 = std::min<std::int64_t>(index_of(box.ymax, frame.y0, frame.dy) + 1, frame.ny - 1);
  return w;
}

std::vector<HemipixelId> candidate_hemipixels(const GridFrame& frame, const Box& box) {
  const IndexWindow w = candidate_pixels(frame, box);
  std::vector<HemipixelId> out;
  if (w.empty()) return out;
  out.reserve(static_cast<std::size_t>(2 * (w.i1 - w.i0 + 1) * (w.j1 - w.j0 + 1)));
  for (std::int64_t j = w.j0; j <= w.j1; ++j) {
    for (std::int64_t i = w.i0; i <= w.i1; ++i) {
      out.push_back({i, j, Half::Upper});
      out.push_back({i, j, Half::Lower});
    }
  }
  return out;
}

IntensityImage::IntensityImage(GridFrame frame, std::size_t channels)
    : frame_(frame), channels_(channels) {
  frame_.validate();
  if (channels_ == 0) throw Error(ErrorKind::InvalidArgument, "image: zero channels");
  values_.assign(static_cast<std::size_t>(frame_.pixel_count()) * channels_, 0.0);
}

IntensityImage::IntensityImage(GridFrame frame, std::size_t channels,
                               std::vector<double> values)
    : frame_(frame), channels_(channels), values_(std::move(values)) {
  frame_.validate();
  if (channels_ == 0) throw Error(ErrorKind::InvalidArgument, "image: zero channels");
  if (values_.size() != static_cast<std::size_t>(frame_.pixel_count()) * channels_) {
    throw Error(ErrorKind::InvalidArgument, "image: value count != nx*ny*channels");
  }
}

void IntensityImage::set_frame(const GridFrame& frame) {
  frame.validate();
  if (frame.nx != frame_.nx || frame.ny != frame_.ny) {
    throw Error(ErrorKind::InvalidArgument, "image: set_frame changes dimensions");
  }
  frame_ = frame;
}

std::vector<double> total_intensity(const IntensityImage& img) {
  std::vector<double> sums(img.channels(), 0.0);
  const auto v = img.values();
  for (std::size_t k = 0; k < v.size(); ++k) sums[k % img.channels()] += v[k];
  return sums;
}

}  // namespace awarp
