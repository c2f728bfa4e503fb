// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace radarppg::sim {

/// Parametric chest-motion model. Amplitudes in mm, frequencies in Hz.
struct PhysioParams {
  double duration_s = 70.0;
  double fs = 200.0;
  double resp_amp_mm = 4.0;
  double resp_freq_hz = 0.25;
  double heart_amp_mm = 0.3;
  double heart_freq_hz = 1.2;
  double heart_sound_amp_mm = 0.02;
  std::pair<double, double> heart_sound_band{20.0, 90.0};
  bool rbm_enabled = false;
  double rbm_v_max_mm_s = 60.0;
  double rbm_burst_rate_hz = 0.15;
  double hr_jitter_frac = 0.05;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument on any violated invariant.
  void validate() const;
  std::size_t num_samples() const;
};

struct PhysioTruth {
  double fs = 200.0;
  std::vector<double> displacement_mm;
  std::vector<double> ppg;
  /// Beat onsets. Only complete beats are synthesized: the first onset lies
  /// in [0, 0.2 / heart_freq) and the last beat ends inside the recording.
  std::vector<double> beat_times_s;
  std::vector<double> rbm_displacement_mm;
};

/// Fraction of each beat interval spent on the systolic upstroke.
inline constexpr double kSystolicRiseFraction = 0.15;

/// Asymmetric raised-cosine pulse on phase in [0, 1): rises to 1 over the
/// systolic fraction, then decays back to 0 at phase 1.
double pulse_shape(double phase);

PhysioTruth generate_physio(const PhysioParams& params);

/// Bursty random body motion in mm. Velocity follows a clipped, mean-reverting
/// random walk that is only active inside Poisson-distributed bursts.
std::vector<double> generate_rbm(double duration_s, double fs, double v_max_mm_s,
                                 double burst_rate_hz, std::uint64_t seed);

}  // namespace radarppg::sim
