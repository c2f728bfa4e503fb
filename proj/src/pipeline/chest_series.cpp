// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "radarppg/dsp/signal_ops.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/pipeline/pipeline.hpp"

namespace radarppg::pipeline {

namespace {
constexpr double kAmplitudeFloor = 1e-12;
}

double wrap_phase(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = x - two_pi * std::floor((x + std::numbers::pi) / two_pi);
  if (w >= std::numbers::pi) w -= two_pi;  // guard rounding at the upper edge
  return w;
}

ChestSeries extract_chest_series(const RangeTime& rt, std::span<const std::size_t> bins,
                                 const sim::RadarConfig& config) {
  const std::size_t n = bins.size();
  if (n != rt.frames) throw ShapeError("extract_chest_series: bin track length != T");
  for (auto b : bins) {
    if (b >= rt.bins) throw InvalidArgument("extract_chest_series: bin index out of range");
  }

  ChestSeries cs;
  cs.bin_index.assign(bins.begin(), bins.end());
  cs.amplitude.resize(n);
  cs.amplitude_db.resize(n);
  cs.dphi.assign(n, 0.0);
  cs.velocity_mm_s.assign(n, 0.0);
  cs.migration_flag.assign(n, false);

  std::vector<double> phase(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto s = rt.at(bins[t], t);
    cs.amplitude[t] = std::abs(s);
    cs.amplitude_db[t] = 20.0 * std::log10(cs.amplitude[t] + kAmplitudeFloor);
    phase[t] = std::arg(s);
  }

  // v = lambda * dphi / (4 pi) * PRF, reported in mm/s.
  const double to_velocity = config.wavelength() * config.prf / (4.0 * std::numbers::pi) * 1e3;
  for (std::size_t t = 1; t < n; ++t) {
    cs.dphi[t] = wrap_phase(phase[t] - phase[t - 1]);
    cs.velocity_mm_s[t] = to_velocity * cs.dphi[t];
  }

  for (std::size_t t = 0; t < n; ++t) {
    const bool prev_changed = t > 0 && bins[t] != bins[t - 1];
    const bool next_changed = t + 1 < n && bins[t] != bins[t + 1];
    cs.migration_flag[t] = prev_changed || next_changed;
  }

  bool any_reliable = false;
  for (std::size_t t = 0; t < n && !any_reliable; ++t) any_reliable = !cs.migration_flag[t];
  if (!any_reliable) throw PipelineError("extract_chest_series: every frame is migration-flagged");
  cs.velocity_refined_mm_s = dsp::interp_flagged(cs.velocity_mm_s, cs.migration_flag);

  cs.displacement_mm.resize(n);
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    acc += cs.velocity_refined_mm_s[t] / config.prf;
    cs.displacement_mm[t] = acc;
  }
  const double m = dsp::mean(cs.displacement_mm);
  for (auto& d : cs.displacement_mm) d -= m;
  return cs;
}

}  // namespace radarppg::pipeline
