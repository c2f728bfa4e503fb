// SPDX-License-Identifier: Apache-2.0
#include "radarppg/sim/radar_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "radarppg/errors.hpp"

namespace radarppg::sim {

void RadarConfig::validate() const {
  if (!(f_carrier > 0.0 && bandwidth > 0.0 && chirp_duration > 0.0 && adc_rate > 0.0 && prf > 0.0)) {
    throw InvalidArgument("RadarConfig: physical parameters must be positive");
  }
  if (n_fast < 2) throw InvalidArgument("RadarConfig: n_fast must be >= 2");
  if (static_cast<double>(n_fast) / adc_rate > chirp_duration * (1.0 + 1e-12)) {
    throw InvalidArgument("RadarConfig: n_fast / adc_rate exceeds the chirp duration");
  }
}

void RecordingCube::validate() const {
  config.validate();
  if (num_fast != config.n_fast) throw ShapeError("RecordingCube: K does not match config.n_fast");
  if (iq.size() != num_fast * num_frames) throw ShapeError("RecordingCube: iq size != K * T");
  if (ppg.size() != num_frames) throw ShapeError("RecordingCube: ppg length != T");
}

namespace {

// Adds a*exp(j(2*pi*fb*(k - kc)/fs + 4*pi*R/lambda)) over fast time.
void add_echo(std::vector<std::complex<double>>& frame, const RadarConfig& cfg, double range_m,
              double amplitude) {
  const double kc = 0.5 * static_cast<double>(frame.size() - 1);
  const double w = 2.0 * std::numbers::pi * cfg.beat_frequency(range_m) / cfg.adc_rate;
  const double phase0 = 4.0 * std::numbers::pi * range_m / cfg.wavelength();
  for (std::size_t k = 0; k < frame.size(); ++k) {
    frame[k] += std::polar(amplitude, w * (static_cast<double>(k) - kc) + phase0);
  }
}

}  // namespace

RecordingCube synthesize_cube(const RadarConfig& config, const PhysioTruth& truth,
                              const SynthesisOptions& options) {
  config.validate();
  const std::size_t frames = truth.displacement_mm.size();
  if (frames == 0) throw InvalidArgument("synthesize_cube: empty truth");
  if (truth.ppg.size() != frames) throw InvalidArgument("synthesize_cube: truth ppg length mismatch");

  const double r_max = config.max_unambiguous_range();
  const auto [dmin, dmax] = std::minmax_element(truth.displacement_mm.begin(), truth.displacement_mm.end());
  const double lo = options.base_range_m + *dmin * 1e-3;
  const double hi = options.base_range_m + *dmax * 1e-3;
  if (!(lo > 0.0 && hi < r_max)) {
    throw InvalidArgument("synthesize_cube: chest range leaves the unambiguous window (0, " +
                          std::to_string(r_max) + ") m");
  }
  for (const auto& c : options.clutter) {
    if (!(c.range_m > 0.0 && c.range_m < r_max)) {
      throw InvalidArgument("synthesize_cube: clutter range outside the unambiguous window");
    }
  }

  RecordingCube cube;
  cube.config = config;
  cube.num_fast = config.n_fast;
  cube.num_frames = frames;
  cube.scenario_label = options.scenario_label;
  cube.iq.resize(cube.num_fast * frames);
  cube.ppg.assign(truth.ppg.begin(), truth.ppg.end());
  cube.truth = truth;

  const bool noisy = std::isfinite(options.snr_db);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double noise_sigma = noisy ? std::sqrt(std::pow(10.0, -options.snr_db / 10.0) / 2.0) : 0.0;

  std::vector<std::complex<double>> clutter_frame(cube.num_fast, {0.0, 0.0});
  for (const auto& c : options.clutter) add_echo(clutter_frame, config, c.range_m, c.amplitude);

  std::vector<std::complex<double>> frame(cube.num_fast);
  for (std::size_t t = 0; t < frames; ++t) {
    frame = clutter_frame;
    add_echo(frame, config, options.base_range_m + truth.displacement_mm[t] * 1e-3, 1.0);
    for (std::size_t k = 0; k < cube.num_fast; ++k) {
      std::complex<double> v = frame[k];
      if (noisy) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += noise_sigma * std::complex<double>(re, im);
      }
      cube.iq[t * cube.num_fast + k] = std::complex<float>(v);
    }
  }
  return cube;
}

}  // namespace radarppg::sim
