// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "radarppg/pipeline/pipeline.hpp"

namespace radarppg::metrics {

inline constexpr std::pair<double, double> kAhrBandHz{0.7, 3.0};
inline constexpr double kAhrWindowS = 10.0;
inline constexpr double kAhrHopS = 1.0;
inline constexpr std::size_t kAhrPadSize = 8192;
inline constexpr double kMinPeakDistanceS = 0.5;
inline constexpr double kHrGridHz = 4.0;
inline constexpr double kEpsilonBpm = 1e-3;

// ---- average heart rate ------------------------------------------------

struct AhrResult {
  double rmse_bpm = 0.0;
  std::vector<double> est_bpm;  // per used frame
  std::vector<double> ref_bpm;
  std::size_t frames_total = 0;
  std::size_t frames_excluded = 0;  // flagged in either signal
};

/// Dominant-frequency tracks of both signals (10 s Hann frames every 1 s,
/// 0.7-3.0 Hz) compared frame by frame. Throws EvaluationError when every
/// frame is flagged, InvalidArgument on unequal or too-short inputs.
AhrResult ahr_error(std::span<const double> est, std::span<const double> ref, double fs);

/// RMSE over the union of the frames of several results.
double pooled_ahr_rmse(std::span<const AhrResult> parts);

// ---- peaks and HRV -----------------------------------------------------

/// Indices of local maxima whose topographic prominence is at least
/// std(x), with pairwise spacing >= 0.5 s. Conflicts go to the more
/// prominent peak (the earlier one on ties). Sorted ascending.
std::vector<std::size_t> detect_peak_indices(std::span<const double> x, double fs);
std::vector<double> detect_peaks(std::span<const double> x, double fs);

/// Prominence of the sample at `peak`, which must be a local maximum.
double peak_prominence(std::span<const double> x, std::size_t peak);

struct HrvResult {
  std::vector<double> est_peaks_s, ref_peaks_s;
  std::vector<double> grid_s;  // 4 Hz grid over the overlap of both HR series
  std::vector<double> est_hr_bpm, ref_hr_bpm;
  double rmse_bpm = 0.0;
  double pearson = 0.0;
};

/// Instantaneous HR series (60 / RR at interval midpoints) compared on a
/// shared 4 Hz grid; C_h is the waveform correlation. Throws
/// EvaluationError when either signal yields fewer than two peaks.
HrvResult hrv_error(std::span<const double> est, std::span<const double> ref, double fs);

/// Instantaneous heart rate from peak times: (midpoints, bpm).
std::pair<std::vector<double>, std::vector<double>> instantaneous_hr(std::span<const double> peaks_s);

double pooled_hrv_rmse(std::span<const HrvResult> parts);

// ---- figures of merit --------------------------------------------------

struct FomScore {
  double fom_ahr_weighted = 0.0;
  double fom_hrv_weighted = 0.0;
  double score = 0.0;
  bool ahr_saturated = false;
  bool hrv_saturated = false;
};

/// fom_ahr = 100 * 10 / (t_cpi * delta_ahr); fom_hrv = (100 / (60 * 0.9)) * C_h / delta_hrv,
/// with both deltas floored at kEpsilonBpm.
FomScore fom_and_score(double delta_ahr_bpm, double pearson, double delta_hrv_bpm, double t_cpi_s = 10.0);
FomScore weighted_sum(double fom_ahr_weighted, double fom_hrv_weighted);
double total_score(std::span<const double> scenario_scores);

/// Trivial comparison estimate: the heart-band displacement channel over
/// [begin, end), z-scored.
std::vector<double> filtering_baseline(const pipeline::FeatureTensor& ft, std::size_t begin, std::size_t end);
std::vector<double> filtering_baseline(const pipeline::FeatureTensor& ft);

}  // namespace radarppg::metrics
