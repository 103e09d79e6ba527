// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "awarp/mapping.hpp"
#include "awarp/raster.hpp"

namespace awarp {

/// Unfiltered inverse-lookup resampler. Each destination pixel center is
/// pulled back through `inverse` and the four surrounding source pixel
/// centers are interpolated bilinearly, clamping at the half-pixel border.
/// Pull-backs outside the source frame, or for which `inverse` throws
/// Error(Singular), give 0.
IntensityImage resample_bilinear(const std::function<Point2(Point2)>& inverse,
                                 const IntensityImage& src, const GridFrame& dst,
                                 unsigned threads = 1);

/// Same, using map.inverse; Error(InvalidArgument) when the map has none.
IntensityImage resample_bilinear(const CoordinateMap& map, const IntensityImage& src,
                                 const GridFrame& dst, unsigned threads = 1);

}  // namespace awarp
