// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "radarppg/dsp/fft.hpp"
#include "radarppg/dsp/window.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/pipeline/pipeline.hpp"

namespace radarppg::pipeline {

RangeTime range_process(const sim::RecordingCube& cube) {
  cube.validate();
  const std::size_t k = cube.num_fast;
  const std::size_t t_frames = cube.num_frames;
  if (k < 2 || t_frames < 2) throw ShapeError("range_process: need K >= 2 and T >= 2");

  RangeTime rt;
  rt.bins = dsp::next_power_of_two(k);
  rt.frames = t_frames;
  rt.data.assign(rt.bins * rt.frames, {0.0, 0.0});

  const auto window = dsp::hamming_window(k);
  std::vector<dsp::Complex> buf(rt.bins);
  for (std::size_t t = 0; t < t_frames; ++t) {
    std::fill(buf.begin(), buf.end(), dsp::Complex{0.0, 0.0});
    for (std::size_t i = 0; i < k; ++i) {
      const auto s = cube.at(i, t);
      buf[i] = dsp::Complex(s.real(), s.imag()) * window[i];
    }
    dsp::fft_inplace(buf, false);
    for (std::size_t b = 0; b < rt.bins; ++b) rt.at(b, t) = buf[b];
  }

  // Zero-Doppler removal.
  for (std::size_t b = 0; b < rt.bins; ++b) {
    dsp::Complex m{0.0, 0.0};
    for (std::size_t t = 0; t < t_frames; ++t) m += rt.at(b, t);
    m /= static_cast<double>(t_frames);
    for (std::size_t t = 0; t < t_frames; ++t) rt.at(b, t) -= m;
  }
  return rt;
}

std::pair<std::size_t, std::size_t> range_window_bins(const sim::RadarConfig& cfg, std::size_t fft_size,
                                                      double min_m, double max_m) {
  if (!(min_m >= 0.0 && min_m < max_m)) throw InvalidArgument("range window: need 0 <= min < max");
  const double per_bin = cfg.range_per_bin(fft_size);
  const auto lo = static_cast<std::size_t>(std::ceil(min_m / per_bin));
  auto hi = static_cast<std::size_t>(std::floor(max_m / per_bin)) + 1;
  hi = std::min(hi, fft_size);
  if (lo >= hi) throw InvalidArgument("range window: no bins inside the requested range");
  return {lo, hi};
}

std::vector<std::size_t> select_chest_bin(const RangeTime& rt, std::pair<std::size_t, std::size_t> search) {
  const auto [lo, hi] = search;
  if (!(lo < hi && hi <= rt.bins)) throw InvalidArgument("select_chest_bin: empty or out-of-range search window");
  std::vector<std::size_t> out(rt.frames);
  for (std::size_t t = 0; t < rt.frames; ++t) {
    std::size_t best = lo;
    double best_p = std::norm(rt.at(lo, t));
    for (std::size_t b = lo + 1; b < hi; ++b) {
      const double p = std::norm(rt.at(b, t));
      if (p > best_p) {
        best_p = p;
        best = b;
      }
    }
    if (t > 0) {
      const std::size_t prev = out[t - 1];
      if (prev != best && std::norm(rt.at(prev, t)) == best_p) best = prev;
    }
    out[t] = best;
  }
  return out;
}

}  // namespace radarppg::pipeline
