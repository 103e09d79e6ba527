// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "awarp/mapping.hpp"
#include "awarp/raster.hpp"

namespace awarp {

struct SourceField {
  std::vector<Point2> centers;
  double sigma = 0.0;
  IntensityImage image;
};

/// Places K unit-flux sources uniformly in the frame shrunk by `margin`,
/// rejecting candidates closer than `min_sep` to an earlier one, and renders
/// each pixel as
///   1/4 [erf((x_i - xs + dx)/sigma) - erf((x_i - xs)/sigma)]
///       [erf((y_j - ys + dy)/sigma) - erf((y_j - ys)/sigma)]
/// with (x_i, y_j) the lower pixel edges. Deterministic for a fixed seed.
/// Throws Error(InvalidArgument) for sigma <= 0 or when placement fails.
SourceField synthesize_sources(const GridFrame& frame, std::size_t count, double sigma,
                               double min_sep, double margin, std::uint64_t seed);

/// Sum of the pixels whose centers lie within `radius` of `center`.
double aperture_sum(const IntensityImage& img, Point2 center, double radius,
                    std::size_t channel = 0);

enum class Estimator {
  Orig,
  AreaWarp,
  AreaResampled,
  AreaResampledCenter,
  Interpolation,
  InterpolationCenter,
};

inline constexpr std::array<Estimator, 6> kAllEstimators{
    Estimator::Orig,          Estimator::AreaWarp,      Estimator::AreaResampled,
    Estimator::AreaResampledCenter, Estimator::Interpolation, Estimator::InterpolationCenter};

std::string_view to_string(Estimator e);

struct EstimatorResult {
  Estimator method = Estimator::Orig;
  /// One value per source; NaN where a Jacobian singularity was hit.
  std::vector<double> s_tilde;
  /// RMS of (s_tilde - 1) over the non-NaN sources.
  double epsilon = 0.0;
  std::size_t flagged = 0;
};

struct EstimatorOptions {
  /// Aperture radius in units of sigma.
  double radius_sigmas = 4.0;
  unsigned threads = 0;
};

/// Warps the field by area (pixel-uniform and weighted-area rules) and by
/// bilinear lookup, and evaluates the six flux estimators. The map needs an
/// inverse and an inverse Jacobian.
std::vector<EstimatorResult> run_estimators(const SourceField& field, const CoordinateMap& map,
                                            const GridFrame& dst,
                                            const EstimatorOptions& options = {});

/// |grad J_f| at every source center; analytic when the map provides it.
std::vector<double> jacobian_gradient_ranking(const SourceField& field, const CoordinateMap& map);

/// Spearman rank correlation with averaged ranks for ties; NaN when either
/// input is constant or shorter than 2. Pairs with a NaN member are skipped.
double spearman(std::span<const double> a, std::span<const double> b);

struct PhotometryConfig {
  std::int64_t src_size = 400;
  std::int64_t dst_size = 50;
  std::size_t sources = 40;
  double sigma = 0.01;
  /// Non-positive values select 10 sigma and 6 sigma respectively.
  double min_sep = 0.0;
  double margin = 0.0;
  std::uint64_t seed = 42;
  EstimatorOptions estimator;
};

struct PhotometryRun {
  SourceField field;
  std::vector<Point2> mapped_centers;
  std::vector<double> grad_j;
  std::vector<EstimatorResult> results;
};

/// End-to-end experiment on unit-square frames.
PhotometryRun run_photometry(const PhotometryConfig& config, const CoordinateMap& map);

/// Rows `k,method,x,y,X,Y,grad_J,s_tilde`, then one `epsilon,<method>,...`
/// row per method carrying epsilon in the last column.
void write_photometry_csv(const PhotometryRun& run, std::ostream& out);

}  // namespace awarp
