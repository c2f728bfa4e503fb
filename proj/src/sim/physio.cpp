// SPDX-License-Identifier: Apache-2.0
#include "radarppg/sim/physio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "radarppg/dsp/fir.hpp"
#include "radarppg/dsp/signal_ops.hpp"
#include "radarppg/errors.hpp"

namespace radarppg::sim {

namespace {

constexpr double kMinBeatInterval = 0.34;
constexpr double kMaxBeatInterval = 1.49;
constexpr double kHeartSoundBurst_s = 0.025;

// Independent, reproducible stream per component.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("PhysioParams: " + what);
}

std::vector<double> heart_sound_noise(const PhysioParams& p, std::size_t n) {
  const double nyquist = p.fs / 2.0;
  const double lo = p.heart_sound_band.first;
  const double hi = std::min(p.heart_sound_band.second, 0.99 * nyquist);
  std::vector<double> noise(n, 0.0);
  if (p.heart_sound_amp_mm <= 0.0 || lo >= hi) return noise;

  auto rng = make_stream(p.seed, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> white(n);
  for (auto& v : white) v = gauss(rng);

  const auto filt = dsp::design_fir(dsp::FilterKind::BandPass, {lo, hi}, p.fs, 101);
  noise = dsp::filtfilt_odd_pad(filt, white);
  const double s = dsp::stddev(noise);
  if (s > 0.0) {
    for (auto& v : noise) v /= s;
  }
  return noise;
}

}  // namespace

void PhysioParams::validate() const {
  require(duration_s > 0.0, "duration_s must be positive");
  require(fs > 0.0, "fs must be positive");
  require(resp_amp_mm >= 0.0 && heart_amp_mm >= 0.0 && heart_sound_amp_mm >= 0.0,
          "amplitudes must be non-negative");
  require(resp_freq_hz >= 0.1 && resp_freq_hz <= 0.5, "resp_freq_hz must lie in [0.1, 0.5]");
  require(heart_freq_hz >= 0.8 && heart_freq_hz <= 2.0, "heart_freq_hz must lie in [0.8, 2.0]");
  require(heart_sound_band.first > 0.0 && heart_sound_band.first < heart_sound_band.second,
          "heart_sound_band must be an increasing positive pair");
  require(rbm_v_max_mm_s >= 0.0, "rbm_v_max_mm_s must be non-negative");
  require(rbm_burst_rate_hz >= 0.0, "rbm_burst_rate_hz must be non-negative");
  require(hr_jitter_frac >= 0.0 && hr_jitter_frac < 0.5, "hr_jitter_frac must lie in [0, 0.5)");
}

std::size_t PhysioParams::num_samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * fs));
}

double pulse_shape(double phase) {
  if (phase < 0.0 || phase >= 1.0) return 0.0;
  if (phase < kSystolicRiseFraction) {
    return 0.5 * (1.0 - std::cos(std::numbers::pi * phase / kSystolicRiseFraction));
  }
  return 0.5 * (1.0 + std::cos(std::numbers::pi * (phase - kSystolicRiseFraction) /
                               (1.0 - kSystolicRiseFraction)));
}

std::vector<double> generate_rbm(double duration_s, double fs, double v_max_mm_s,
                                 double burst_rate_hz, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  std::vector<double> disp(n, 0.0);
  if (n == 0 || v_max_mm_s <= 0.0 || burst_rate_hz <= 0.0) return disp;

  auto rng = make_stream(seed, 4);
  std::exponential_distribution<double> gap(burst_rate_hz);
  std::uniform_real_distribution<double> burst_len(0.5, 3.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<bool> active(n, false);
  for (double t = gap(rng); t < duration_s;) {
    const double len = burst_len(rng);
    const auto a = static_cast<std::size_t>(t * fs);
    const auto b = std::min(n, static_cast<std::size_t>((t + len) * fs));
    for (std::size_t i = a; i < b; ++i) active[i] = true;
    t += len + gap(rng);
  }

  // Ornstein-Uhlenbeck velocity with stationary std v_max / 2 and a weak
  // spring toward the rest position, clipped at +-v_max.
  constexpr double tau = 0.5;
  constexpr double spring = 0.5;
  const double dt = 1.0 / fs;
  const double sigma = 0.5 * v_max_mm_s * std::sqrt(2.0 / tau);
  double v = 0.0;
  double x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) {
      v += (-v / tau - spring * x) * dt + sigma * std::sqrt(dt) * gauss(rng);
      v = std::clamp(v, -v_max_mm_s, v_max_mm_s);
    } else {
      v = 0.0;
    }
    x += v * dt;
    disp[i] = x;
  }
  const double m = dsp::mean(disp);
  for (auto& d : disp) d -= m;
  return disp;
}

PhysioTruth generate_physio(const PhysioParams& p) {
  p.validate();
  const std::size_t n = p.num_samples();
  PhysioTruth truth;
  truth.fs = p.fs;

  auto rng = make_stream(p.seed, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double period = 1.0 / p.heart_freq_hz;
  const double resp_phase = 2.0 * std::numbers::pi * unit(rng);

  // Beat schedule: only beats that complete inside the recording.
  std::vector<double> onsets;
  std::vector<double> intervals;
  double onset = 0.2 * period * unit(rng);
  for (;;) {
    const double iv =
        std::clamp(period * (1.0 + p.hr_jitter_frac * gauss(rng)), kMinBeatInterval, kMaxBeatInterval);
    if (onset + iv > p.duration_s) break;
    onsets.push_back(onset);
    intervals.push_back(iv);
    onset += iv;
  }
  truth.beat_times_s = onsets;

  std::vector<double> pulses(n, 0.0);
  for (std::size_t b = 0; b < onsets.size(); ++b) {
    const auto i0 = static_cast<std::size_t>(std::ceil(onsets[b] * p.fs));
    const auto i1 = std::min(n, static_cast<std::size_t>(std::ceil((onsets[b] + intervals[b]) * p.fs)));
    for (std::size_t i = i0; i < i1; ++i) {
      const double t = static_cast<double>(i) / p.fs;
      pulses[i] += pulse_shape((t - onsets[b]) / intervals[b]);
    }
  }

  const auto sound = heart_sound_noise(p, n);
  std::vector<double> sound_gated(n, 0.0);
  for (double on : onsets) {
    const auto i0 = static_cast<std::size_t>(std::ceil(on * p.fs));
    const auto i1 = std::min(n, static_cast<std::size_t>(std::ceil((on + kHeartSoundBurst_s) * p.fs)));
    for (std::size_t i = i0; i < i1; ++i) sound_gated[i] = sound[i];
  }

  truth.rbm_displacement_mm =
      p.rbm_enabled ? generate_rbm(p.duration_s, p.fs, p.rbm_v_max_mm_s, p.rbm_burst_rate_hz, p.seed)
                    : std::vector<double>(n, 0.0);

  truth.displacement_mm.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / p.fs;
    const double resp = p.resp_amp_mm * std::sin(2.0 * std::numbers::pi * p.resp_freq_hz * t + resp_phase);
    truth.displacement_mm[i] = resp + p.heart_amp_mm * pulses[i] +
                               p.heart_sound_amp_mm * sound_gated[i] + truth.rbm_displacement_mm[i];
  }

  // PPG: the same per-beat template, standardized per recording.
  truth.ppg = pulses;
  const double m = dsp::mean(truth.ppg);
  const double s = dsp::stddev(truth.ppg);
  for (auto& v : truth.ppg) v = s > 0.0 ? (v - m) / s : 0.0;
  return truth;
}

}  // namespace radarppg::sim
