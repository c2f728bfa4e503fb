// SPDX-License-Identifier: Apache-2.0
#include "radarppg/dsp/stft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radarppg/dsp/fft.hpp"
#include "radarppg/dsp/window.hpp"
#include "radarppg/errors.hpp"

namespace radarppg::dsp {

Spectrogram stft_magnitude(std::span<const double> x, double fs, const StftParams& params) {
  if (!(fs > 0.0) || !(params.window_s > 0.0) || !(params.hop_s > 0.0)) {
    throw InvalidArgument("stft: fs, window and hop must be positive");
  }
  const auto win_len = static_cast<std::size_t>(std::lround(params.window_s * fs));
  const auto hop = static_cast<std::size_t>(std::lround(params.hop_s * fs));
  if (!is_power_of_two(params.pad_size) || params.pad_size < win_len) {
    throw InvalidArgument("stft: pad size must be a power of two >= window length");
  }

  Spectrogram sg;
  sg.bins = params.pad_size / 2 + 1;
  sg.bin_freqs.resize(sg.bins);
  for (std::size_t b = 0; b < sg.bins; ++b) {
    sg.bin_freqs[b] = fs * static_cast<double>(b) / static_cast<double>(params.pad_size);
  }
  if (win_len == 0 || x.size() < win_len || hop == 0) return sg;

  sg.frames = (x.size() - win_len) / hop + 1;
  sg.magnitudes.assign(sg.frames * sg.bins, 0.0);
  sg.frame_times.resize(sg.frames);
  sg.degenerate.assign(sg.frames, false);

  const auto window = hann_window(win_len);
  std::vector<Complex> buf(params.pad_size);
  for (std::size_t f = 0; f < sg.frames; ++f) {
    const std::size_t start = f * hop;
    sg.frame_times[f] = (static_cast<double>(start) + 0.5 * static_cast<double>(win_len)) / fs;

    const auto frame = x.subspan(start, win_len);
    double m = 0.0;
    double raw_peak = 0.0;
    for (double v : frame) {
      m += v;
      raw_peak = std::max(raw_peak, std::abs(v));
    }
    m /= static_cast<double>(win_len);

    double resid_peak = 0.0;
    std::fill(buf.begin(), buf.end(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < win_len; ++i) {
      const double v = frame[i] - m;
      resid_peak = std::max(resid_peak, std::abs(v));
      buf[i] = Complex{v * window[i], 0.0};
    }
    // A constant frame leaves only rounding residue after mean removal.
    if (resid_peak <= 1e-12 * raw_peak || resid_peak == 0.0) {
      sg.degenerate[f] = true;
      continue;
    }
    fft_inplace(buf, false);
    for (std::size_t b = 0; b < sg.bins; ++b) sg.magnitudes[f * sg.bins + b] = std::abs(buf[b]);
  }
  return sg;
}

PeakTrack stft_peak_track(std::span<const double> x, double fs, const StftParams& params,
                          std::pair<double, double> search_band) {
  if (!(search_band.first < search_band.second)) {
    throw InvalidArgument("stft_peak_track: empty search band");
  }
  const Spectrogram sg = stft_magnitude(x, fs, params);
  PeakTrack track;
  track.times_s = sg.frame_times;
  track.freqs_hz.assign(sg.frames, std::numeric_limits<double>::quiet_NaN());
  track.flagged.assign(sg.frames, true);

  std::size_t lo = sg.bins;
  std::size_t hi = 0;
  for (std::size_t b = 0; b < sg.bins; ++b) {
    if (sg.bin_freqs[b] >= search_band.first && sg.bin_freqs[b] <= search_band.second) {
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
  }
  if (lo > hi) return track;

  const double df = sg.bin_freqs.size() > 1 ? sg.bin_freqs[1] : 0.0;
  for (std::size_t f = 0; f < sg.frames; ++f) {
    if (sg.degenerate[f]) continue;
    std::size_t best = lo;
    for (std::size_t b = lo + 1; b <= hi; ++b) {
      if (sg.at(f, b) > sg.at(f, best)) best = b;
    }
    if (!(sg.at(f, best) > 0.0)) continue;
    double offset = 0.0;
    if (best > 0 && best + 1 < sg.bins) {
      const double a = sg.at(f, best - 1);
      const double b = sg.at(f, best);
      const double c = sg.at(f, best + 1);
      const double denom = a - 2.0 * b + c;
      if (denom < 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    }
    track.freqs_hz[f] = (static_cast<double>(best) + offset) * df;
    track.flagged[f] = false;
  }
  return track;
}

}  // namespace radarppg::dsp
