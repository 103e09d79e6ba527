// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "awarp/mapping.hpp"
#include "awarp/raster.hpp"

namespace awarp {

enum class WeightingRule {
  /// Each hemipixel carries half the pixel intensity, normalised by its own
  /// transformed area.
  Hemipixel,
  /// Both hemipixels share the transformed pixel area as denominator.
  PixelUniform,
  /// Normalised by the destination pixel area: value preserving.
  WeightedArea,
};

std::string_view to_string(WeightingRule rule);
/// Accepts "hemi", "pixel", "area" (and the enum names, case-insensitive).
WeightingRule parse_weighting_rule(std::string_view text);

/// One nonzero B(l,m; i,j): destination pixel (l, m), source pixel (i, j).
struct WarpEntry {
  std::uint32_t l = 0;
  std::uint32_t m = 0;
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  double weight = 0.0;

  friend bool operator==(const WarpEntry&, const WarpEntry&) = default;
};

/// Sparse warp matrix; entries unique and sorted by (l, m, i, j).
struct WarpMatrix {
  GridFrame dst_frame;
  GridFrame src_frame;
  /// Unset for matrices read back from disk.
  std::optional<WeightingRule> rule;
  std::vector<WarpEntry> entries;

  // Build diagnostics.
  std::uint64_t skipped_degenerate = 0;
  /// Sum of |A[f(t)]| over all non-degenerate source hemipixels.
  double mapped_area = 0.0;
  /// Part of mapped_area that landed on the destination raster.
  double covered_area = 0.0;

  std::size_t nnz() const { return entries.size(); }
  double lost_fraction() const {
    return mapped_area > 0.0 ? 1.0 - covered_area / mapped_area : 0.0;
  }
};

struct BuildOptions {
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  /// Duplicate-merge tolerance relative to the larger triangle diameter.
  double dup_factor = 1e-9;
  /// Entries with weight <= prune_threshold are dropped.
  double prune_threshold = 1e-300;
};

/// Builds B for `map` from `src` to `dst`. Each source pixel is split into
/// its two hemipixels, both are mapped forward through the pixel corners,
/// and their overlaps with the destination hemipixels in the bounding-box
/// window are accumulated under `rule`.
///
/// A mapped hemipixel with (numerically) zero area deposits its share on the
/// destination pixel containing its vertex centroid, or is lost if that lies
/// off the raster. Output is bit-identical for any thread count.
WarpMatrix build_matrix(const CoordinateMap& map, const GridFrame& src,
                        const GridFrame& dst, WeightingRule rule,
                        const BuildOptions& options = {});

/// I2(l,m) = sum B(l,m;i,j) I1(i,j) per channel, summed in entry order.
IntensityImage apply(const WarpMatrix& b, const IntensityImage& img, unsigned threads = 1);

struct WarpReport {
  /// (sum I1 - sum I2) / sum I1 over all channels.
  double delta = 0.0;
  /// Column sums over source pixels whose mapped quadrilateral lies inside
  /// the destination raster; NaN when there are none.
  double column_sum_min = 0.0;
  double column_sum_max = 0.0;
  std::uint64_t fully_covered_columns = 0;
  /// Median of |rowsum - s/J_f| / (s/J_f), s = (dX dY)/(dx dy), over
  /// destination pixels off the raster border; NaN without an inverse
  /// Jacobian.
  double row_sum_median_rel_error = 0.0;
  std::uint64_t row_sum_samples = 0;
  std::uint64_t nnz = 0;
  std::uint64_t skipped_degenerate = 0;
  double lost_fraction = 0.0;
};

WarpReport report(const WarpMatrix& b, const CoordinateMap& map, const IntensityImage& src,
                  const IntensityImage& dst);

/// AWM1 text format: header `AWM1 N2 M2 N1 M1 nnz`, then `l m i j w` lines.
void write_matrix(const WarpMatrix& b, const std::filesystem::path& path);
/// Frames come back as unit-square frames of the stored dimensions.
WarpMatrix read_matrix(const std::filesystem::path& path);

/// Bounding box of the mapped pixel corners of `src`, padded by a relative
/// 1e-12 so every mapped vertex lands inside.
Box mapped_bounding_box(const CoordinateMap& map, const GridFrame& src);

}  // namespace awarp
