// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "awarp/raster.hpp"

namespace awarp {

/// Alternating 0/255 squares of `cell` pixels; pixel (0,0) is 0.
IntensityImage make_checker(std::int64_t nx, std::int64_t ny, std::int64_t cell);

/// Grating periods of the bars pattern, left to right, in source pixels.
inline constexpr std::array<int, 5> kBarPeriods{20, 12, 6, 4, 2};

/// Five side-by-side vertical gratings 127.5 + 127.5 cos(2 pi i / P),
/// rounded to integers in [0, 255]. Band b spans columns
/// [floor(b*nx/5), floor((b+1)*nx/5)) and starts at phase 0.
IntensityImage make_bars(std::int64_t nx = 512, std::int64_t ny = 100);

/// Column range [begin, end) of band b in a raster of width nx.
struct ColumnRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;
};
ColumnRange bar_band(std::int64_t nx, int band);

/// Largest DFT magnitude over nonzero frequencies of row `row`, columns
/// [c0, c1), after removing the mean; normalised by the sample count so a
/// pure cosine of amplitude a gives a/2.
double dominant_alias_amplitude(const IntensityImage& img, std::int64_t row, std::int64_t c0,
                                std::int64_t c1, std::size_t channel = 0);

}  // namespace awarp
