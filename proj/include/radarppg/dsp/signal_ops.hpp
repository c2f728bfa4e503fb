// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace radarppg::dsp {

/// Centered sliding maximum; the window shrinks at the edges. `window` must be odd.
std::vector<double> max_filter(std::span<const double> x, std::size_t window);

/// Replaces flagged samples by linear interpolation between the nearest
/// unflagged neighbours. Runs touching either end hold the nearest reliable
/// value. Throws InvalidArgument when every sample is flagged.
std::vector<double> interp_flagged(std::span<const double> x, const std::vector<bool>& flags);

/// Logistic 1 / (1 + exp(-(x - threshold) / scale)).
double soft_indicator(double x, double threshold, double scale);

double mean(std::span<const double> x);
/// Population standard deviation.
double stddev(std::span<const double> x);
/// Pearson correlation; 0 when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// z-scores in place with the sample's own moments (std floored at 1e-12).
void zscore_inplace(std::span<double> x);

}  // namespace radarppg::dsp
