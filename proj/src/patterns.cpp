// SPDX-License-Identifier: Apache-2.0
#include "awarp/patterns.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "awarp/error.hpp"

namespace awarp {

IntensityImage make_checker(std::int64_t nx, std::int64_t ny, std::int64_t cell) {
  if (nx < 1 || ny < 1 || cell < 1) {
    throw Error(ErrorKind::InvalidArgument, "checker: sizes must be >= 1");
  }
  IntensityImage img(GridFrame::unit(nx, ny), 1);
  for (std::int64_t j = 0; j < ny; ++j) {
    for (std::int64_t i = 0; i < nx; ++i) img.at(i, j) = ((i / cell + j / cell) % 2) * 255.0;
  }
  return img;
}

ColumnRange bar_band(std::int64_t nx, int band) {
  const auto n = static_cast<std::int64_t>(kBarPeriods.size());
  if (band < 0 || band >= n) throw Error(ErrorKind::OutOfRange, "bars: band index");
  return {band * nx / n, (band + 1) * nx / n};
}

IntensityImage make_bars(std::int64_t nx, std::int64_t ny) {
  if (nx < static_cast<std::int64_t>(kBarPeriods.size()) || ny < 1) {
    throw Error(ErrorKind::InvalidArgument, "bars: need width >= 5 and height >= 1");
  }
  IntensityImage img(GridFrame::unit(nx, ny), 1);
  for (int b = 0; b < static_cast<int>(kBarPeriods.size()); ++b) {
    const ColumnRange r = bar_band(nx, b);
    const std::int64_t period = kBarPeriods[static_cast<std::size_t>(b)];
    const double k = 2.0 * std::numbers::pi / static_cast<double>(period);
    for (std::int64_t i = r.begin; i < r.end; ++i) {
      // Phase reduced first so every period rounds identically.
      const auto phase = static_cast<double>((i - r.begin) % period);
      const double v = std::round(127.5 + 127.5 * std::cos(k * phase));
      for (std::int64_t j = 0; j < ny; ++j) img.at(i, j) = v;
    }
  }
  return img;
}

double dominant_alias_amplitude(const IntensityImage& img, std::int64_t row, std::int64_t c0,
                                std::int64_t c1, std::size_t channel) {
  const GridFrame& f = img.frame();
  if (row < 0 || row >= f.ny || c0 < 0 || c1 > f.nx || c1 - c0 < 2 ||
      channel >= img.channels()) {
    throw Error(ErrorKind::OutOfRange, "alias amplitude: window outside image");
  }
  const auto n = static_cast<std::size_t>(c1 - c0);
  std::vector<double> s(n);
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = img.at(c0 + static_cast<std::int64_t>(k), row, channel);
    mean += s[k];
  }
  mean /= static_cast<double>(n);
  double best = 0.0;
  for (std::size_t q = 1; q <= n / 2; ++q) {
    std::complex<double> acc;
    for (std::size_t k = 0; k < n; ++k) {
      acc += (s[k] - mean) * std::polar(1.0, -2.0 * std::numbers::pi *
                                                static_cast<double>(q * k % n) /
                                                static_cast<double>(n));
    }
    best = std::max(best, std::abs(acc) / static_cast<double>(n));
  }
  return best;
}

}  // namespace awarp
