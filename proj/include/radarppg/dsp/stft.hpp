// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace radarppg::dsp {

struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> magnitudes;  // frames x bins, row-major
  std::vector<double> frame_times;  // seconds, frame centers
  std::vector<double> bin_freqs;    // Hz, 0 .. fs/2
  std::vector<bool> degenerate;     // frame had no energy after mean removal

  double at(std::size_t frame, std::size_t bin) const { return magnitudes[frame * bins + bin]; }
};

struct StftParams {
  double window_s = 10.0;
  double hop_s = 1.0;
  std::size_t pad_size = 8192;
};

/// One-sided magnitude STFT. Each frame is mean-subtracted, Hann-windowed and
/// zero-padded to pad_size. Returns zero frames when x is shorter than a window.
Spectrogram stft_magnitude(std::span<const double> x, double fs, const StftParams& params);

struct PeakTrack {
  std::vector<double> times_s;
  std::vector<double> freqs_hz;  // NaN where flagged
  std::vector<bool> flagged;

  std::size_t size() const noexcept { return times_s.size(); }
};

/// Dominant spectral peak per STFT frame within search_band, refined by
/// parabolic interpolation across the peak bin and its neighbours.
PeakTrack stft_peak_track(std::span<const double> x, double fs, const StftParams& params,
                          std::pair<double, double> search_band);

}  // namespace radarppg::dsp
