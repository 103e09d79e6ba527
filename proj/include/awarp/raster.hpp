// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "awarp/geom.hpp"

namespace awarp {

/// Equispaced pixel grid. Pixel (i, j), zero based, spans
/// [x0 + i*dx, x0 + (i+1)*dx) x [y0 + j*dy, y0 + (j+1)*dy).
struct GridFrame {
  double x0 = 0.0;
  double y0 = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  std::int64_t nx = 1;
  std::int64_t ny = 1;

  /// nx x ny pixels exactly covering [x0, x1] x [y0, y1].
  static GridFrame over_box(double x0, double y0, double x1, double y1,
                            std::int64_t nx, std::int64_t ny);
  /// nx x ny pixels on the unit square.
  static GridFrame unit(std::int64_t nx, std::int64_t ny);

  void validate() const;

  double edge_x(std::int64_t i) const { return x0 + static_cast<double>(i) * dx; }
  double edge_y(std::int64_t j) const { return y0 + static_cast<double>(j) * dy; }
  double center_x(std::int64_t i) const { return x0 + (static_cast<double>(i) + 0.5) * dx; }
  double center_y(std::int64_t j) const { return y0 + (static_cast<double>(j) + 0.5) * dy; }
  double x_end() const { return edge_x(nx); }
  double y_end() const { return edge_y(ny); }
  double pixel_area() const { return dx * dy; }
  std::int64_t pixel_count() const { return nx * ny; }

  friend bool operator==(const GridFrame&, const GridFrame&) = default;
};

enum class Half : std::uint8_t { Upper, Lower };

struct HemipixelId {
  std::int64_t i = 0;
  std::int64_t j = 0;
  Half half = Half::Lower;

  friend bool operator==(const HemipixelId&, const HemipixelId&) = default;
};

/// U = {(x_i,y_j), (x_{i+1},y_{j+1}), (x_i,y_{j+1})},
/// L = {(x_i,y_j), (x_{i+1},y_j), (x_{i+1},y_{j+1})}.
/// Throws Error(OutOfRange) for indices outside the frame.
Triangle2 hemipixel_triangle(const GridFrame& frame, const HemipixelId& id);

/// Axis-aligned rectangle, inclusive bounds.
struct Box {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;
};

/// Inclusive pixel index window.
struct IndexWindow {
  std::int64_t i0 = 0, i1 = -1;
  std::int64_t j0 = 0, j1 = -1;

  bool empty() const { return i1 < i0 || j1 < j0; }
};

/// Pixels whose index rectangle touches the box, widened by one pixel on
/// each side and clamped to the raster. Empty when the box lies outside.
IndexWindow candidate_pixels(const GridFrame& frame, const Box& box);

/// Both hemipixels of every pixel in candidate_pixels(frame, box), in
/// (j, i, U, L) order.
std::vector<HemipixelId> candidate_hemipixels(const GridFrame& frame, const Box& box);

/// Dense raster, row-major (index (j*nx + i)*channels + c).
class IntensityImage {
 public:
  IntensityImage() = default;
  IntensityImage(GridFrame frame, std::size_t channels);
  IntensityImage(GridFrame frame, std::size_t channels, std::vector<double> values);

  const GridFrame& frame() const { return frame_; }
  std::size_t channels() const { return channels_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double at(std::int64_t i, std::int64_t j, std::size_t c = 0) const {
    return values_[index(i, j, c)];
  }
  double& at(std::int64_t i, std::int64_t j, std::size_t c = 0) {
    return values_[index(i, j, c)];
  }

  /// Re-homes the pixels on another frame of the same dimensions.
  void set_frame(const GridFrame& frame);

 private:
  std::size_t index(std::int64_t i, std::int64_t j, std::size_t c) const {
    return (static_cast<std::size_t>(j) * static_cast<std::size_t>(frame_.nx) +
            static_cast<std::size_t>(i)) *
               channels_ +
           c;
  }

  GridFrame frame_;
  std::size_t channels_ = 1;
  std::vector<double> values_;
};

/// Per-channel sums.
std::vector<double> total_intensity(const IntensityImage& img);

enum class ImageFormat { Auto, Awf1, Pgm8, Pgm16 };

/// Reads P5 (8 or 16 bit) or AWF1 by magic. Pixels land on the unit-square
/// frame.
IntensityImage read_image(const std::filesystem::path& path);

/// Auto picks PGM8 for ".pgm" and AWF1 otherwise. Integer formats round and
/// clamp; AWF1 stores float32.
void write_image(const IntensityImage& img, const std::filesystem::path& path,
                 ImageFormat format = ImageFormat::Auto);

}  // namespace awarp
