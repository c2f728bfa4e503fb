// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radarppg/dsp/fir.hpp"
#include "radarppg/sim/radar_sim.hpp"

namespace radarppg::pipeline {

/// Range profiles after clutter removal: bins x frames, bin-major.
struct RangeTime {
  std::size_t bins = 0;    // K' (padded FFT size)
  std::size_t frames = 0;  // T
  std::vector<std::complex<double>> data;

  std::complex<double> at(std::size_t bin, std::size_t frame) const { return data[bin * frames + frame]; }
  std::complex<double>& at(std::size_t bin, std::size_t frame) { return data[bin * frames + frame]; }
};

/// Fast-time Hamming window, FFT zero-padded to the next power of two >= K,
/// then per-bin subtraction of the slow-time mean.
RangeTime range_process(const sim::RecordingCube& cube);

/// Half-open bin window [lo, hi) covering ranges [min_m, max_m].
std::pair<std::size_t, std::size_t> range_window_bins(const sim::RadarConfig& cfg, std::size_t fft_size,
                                                      double min_m, double max_m);

/// Per-frame argmax of |rt|^2 over [lo, hi). Ties keep the previous frame's
/// bin; on the first frame the lower index wins.
std::vector<std::size_t> select_chest_bin(const RangeTime& rt, std::pair<std::size_t, std::size_t> search);

struct ChestSeries {
  std::vector<std::size_t> bin_index;
  std::vector<double> amplitude;
  std::vector<double> amplitude_db;
  std::vector<double> dphi;  // rad in [-pi, pi), dphi[0] = 0
  std::vector<double> velocity_mm_s;
  std::vector<double> velocity_refined_mm_s;
  std::vector<double> displacement_mm;  // zero mean
  std::vector<bool> migration_flag;

  std::size_t size() const noexcept { return bin_index.size(); }
};

/// Wraps an angle to [-pi, pi).
double wrap_phase(double x);

ChestSeries extract_chest_series(const RangeTime& rt, std::span<const std::size_t> bins,
                                 const sim::RadarConfig& config);

inline constexpr std::size_t kFeatureChannels = 8;

enum FeatureChannel : std::size_t {
  kDisplacement = 0,
  kAmplitudeDb = 1,
  kRespBand = 2,
  kHeartBand = 3,
  kHeartSoundBand = 4,
  kVelocity = 5,
  kRbmIndicator = 6,
  kMigrationFlag = 7,
};

struct FeatureTensor {
  std::size_t frames = 0;
  std::vector<double> channels;  // 8 x frames, channel-major
  std::size_t cpi_start_index = 0;
  double fs = 200.0;

  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(channels).subspan(c * frames, frames);
  }
  std::span<double> channel(std::size_t c) { return std::span<double>(channels).subspan(c * frames, frames); }
};

struct FeatureFilters {
  dsp::FirFilter resp;
  dsp::FirFilter heart;
  dsp::FirFilter sound;
};

inline constexpr std::pair<double, double> kRespBandHz{0.2, 0.5};
inline constexpr std::pair<double, double> kHeartBandHz{0.7, 2.0};
inline constexpr double kHeartSoundCutoffHz = 20.0;
inline constexpr double kRbmVelocityThreshold_mm_s = 25.0;
inline constexpr double kRbmVelocityScale_mm_s = 5.0;
inline constexpr double kRbmMaxFilter_s = 0.2;

/// Respiration 4001 taps, heartbeat 1001 taps, heart-sound high-pass 201 taps.
FeatureFilters default_feature_filters(double fs);

FeatureTensor build_features(const ChestSeries& cs, const FeatureFilters& filters, double fs);

struct CpiWindow {
  std::size_t start = 0;         // absolute frame index
  std::vector<double> features;  // 8 x len, channel-major
  std::vector<double> ppg;       // len
  std::size_t length() const noexcept { return ppg.size(); }
};

/// Windows of window_s seconds every stride_s seconds lying entirely inside
/// [begin, end). Window i starts at begin + i * stride.
std::vector<CpiWindow> segment_cpis(const FeatureTensor& ft, std::span<const double> ppg, double window_s,
                                    double stride_s, std::size_t begin, std::size_t end);
std::vector<CpiWindow> segment_cpis(const FeatureTensor& ft, std::span<const double> ppg, double window_s = 10.0,
                                    double stride_s = 1.0);

struct ProcessOptions {
  double search_min_m = 0.2;
  double search_max_m = 1.5;
};

struct ProcessedRecording {
  ChestSeries chest;
  FeatureTensor features;
  std::vector<double> ppg;
  std::string scenario_label;
};

/// range_process -> select_chest_bin -> extract_chest_series -> build_features.
ProcessedRecording process_recording(const sim::RecordingCube& cube, const FeatureFilters& filters,
                                     const ProcessOptions& options = {});

}  // namespace radarppg::pipeline
