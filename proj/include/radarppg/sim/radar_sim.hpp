// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "radarppg/sim/physio.hpp"

namespace radarppg::sim {

inline constexpr double kSpeedOfLight = 299792458.0;

struct RadarConfig {
  double f_carrier = 77e9;         // Hz
  double bandwidth = 3.6e9;        // Hz
  double chirp_duration = 60e-6;   // s
  double adc_rate = 2e6;           // samples/s
  std::size_t n_fast = 100;
  double prf = 200.0;              // frames/s
  double tx_power_dbm = 13.0;      // informational

  void validate() const;
  double wavelength() const { return kSpeedOfLight / f_carrier; }
  double slope() const { return bandwidth / chirp_duration; }
  /// Range resolution c / (2 B).
  double range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth); }
  /// Largest range whose beat frequency stays below adc_rate / 2.
  double max_unambiguous_range() const { return kSpeedOfLight * adc_rate / (4.0 * slope()); }
  double beat_frequency(double range_m) const { return 2.0 * slope() * range_m / kSpeedOfLight; }
  /// Range spanned by one bin of an fft_size-point fast-time FFT.
  double range_per_bin(std::size_t fft_size) const {
    return adc_rate / static_cast<double>(fft_size) * kSpeedOfLight / (2.0 * slope());
  }
};

/// Dechirped recording: K fast-time samples per frame, T frames. Samples are
/// stored as float32 pairs, fast-time index varying fastest, matching the
/// on-disk layout so that IO round trips are bit-exact.
struct RecordingCube {
  RadarConfig config;
  std::size_t num_fast = 0;    // K
  std::size_t num_frames = 0;  // T
  std::vector<std::complex<float>> iq;
  std::vector<float> ppg;
  std::string scenario_label;
  std::optional<PhysioTruth> truth;

  std::complex<float> at(std::size_t k, std::size_t t) const { return iq[t * num_fast + k]; }
  double duration_s() const { return static_cast<double>(num_frames) / config.prf; }
  void validate() const;
};

struct ClutterTarget {
  double range_m = 0.3;
  double amplitude = 2.0;
};

struct SynthesisOptions {
  double base_range_m = 0.7;
  std::vector<ClutterTarget> clutter{{0.3, 2.0}};
  /// Relative to the unit chest echo; +inf disables noise.
  double snr_db = 20.0;
  std::uint64_t seed = 1;
  std::string scenario_label;

  static constexpr double kNoiseless = std::numeric_limits<double>::infinity();
};

/// Chest echo at range base_range + displacement(t) with unit amplitude, plus
/// static clutter and complex white noise. The fast-time phase is referenced
/// to the middle of the sampled chirp, so the echo phase there is exactly
/// 4*pi*R/lambda.
RecordingCube synthesize_cube(const RadarConfig& config, const PhysioTruth& truth,
                              const SynthesisOptions& options);

}  // namespace radarppg::sim
