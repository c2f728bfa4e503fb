// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <iostream>

#include "radarppg/dsp/signal_ops.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/pipeline/pipeline.hpp"

namespace radarppg::pipeline {

namespace {

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

void check_band_pass(const dsp::FirFilter& f, std::pair<double, double> band, double fs, const char* name) {
  if (f.kind() != dsp::FilterKind::BandPass || !f.band().high_hz || !same(f.band().low_hz, band.first) ||
      !same(*f.band().high_hz, band.second) || !same(f.sample_rate(), fs)) {
    throw InvalidArgument(std::string("build_features: ") + name + " filter does not match its band");
  }
}

}  // namespace

FeatureFilters default_feature_filters(double fs) {
  using dsp::FilterKind;
  return FeatureFilters{
      dsp::design_fir(FilterKind::BandPass, {kRespBandHz.first, kRespBandHz.second}, fs, 4001),
      dsp::design_fir(FilterKind::BandPass, {kHeartBandHz.first, kHeartBandHz.second}, fs, 1001),
      dsp::design_fir(FilterKind::HighPass, {kHeartSoundCutoffHz, std::nullopt}, fs, 201),
  };
}

FeatureTensor build_features(const ChestSeries& cs, const FeatureFilters& filters, double fs) {
  check_band_pass(filters.resp, kRespBandHz, fs, "respiration");
  check_band_pass(filters.heart, kHeartBandHz, fs, "heartbeat");
  if (filters.sound.kind() != dsp::FilterKind::HighPass || !same(filters.sound.band().low_hz, kHeartSoundCutoffHz) ||
      !same(filters.sound.sample_rate(), fs)) {
    throw InvalidArgument("build_features: heart-sound filter must be a 20 Hz high-pass");
  }
  const std::size_t n = cs.size();
  if (n == 0) throw InvalidArgument("build_features: empty chest series");

  FeatureTensor ft;
  ft.frames = n;
  ft.fs = fs;
  ft.channels.assign(kFeatureChannels * n, 0.0);

  auto put = [&](std::size_t c, const std::vector<double>& v) {
    std::copy(v.begin(), v.end(), ft.channel(c).begin());
  };
  put(kDisplacement, cs.displacement_mm);
  put(kAmplitudeDb, cs.amplitude_db);
  put(kRespBand, dsp::filtfilt_odd_pad(filters.resp, cs.displacement_mm));
  put(kHeartBand, dsp::filtfilt_odd_pad(filters.heart, cs.displacement_mm));
  put(kHeartSoundBand, dsp::filtfilt_odd_pad(filters.sound, cs.displacement_mm));
  put(kVelocity, cs.velocity_refined_mm_s);

  std::vector<double> rbm(n);
  for (std::size_t t = 0; t < n; ++t) {
    rbm[t] = dsp::soft_indicator(std::abs(cs.velocity_refined_mm_s[t]), kRbmVelocityThreshold_mm_s,
                                 kRbmVelocityScale_mm_s);
  }
  auto window = static_cast<std::size_t>(std::lround(kRbmMaxFilter_s * fs));
  if (window % 2 == 0) ++window;
  put(kRbmIndicator, dsp::max_filter(rbm, window));

  auto mig = ft.channel(kMigrationFlag);
  for (std::size_t t = 0; t < n; ++t) mig[t] = cs.migration_flag[t] ? 1.0 : 0.0;
  return ft;
}

std::vector<CpiWindow> segment_cpis(const FeatureTensor& ft, std::span<const double> ppg, double window_s,
                                    double stride_s, std::size_t begin, std::size_t end) {
  if (!(stride_s > 0.0) || !(window_s > 0.0)) throw InvalidArgument("segment_cpis: window and stride must be positive");
  if (ppg.size() != ft.frames) throw ShapeError("segment_cpis: PPG length != feature length");
  if (begin > end || end > ft.frames) throw InvalidArgument("segment_cpis: range outside the recording");
  const auto len = static_cast<std::size_t>(std::lround(window_s * ft.fs));
  const auto stride = static_cast<std::size_t>(std::lround(stride_s * ft.fs));
  if (len == 0 || stride == 0) throw InvalidArgument("segment_cpis: window or stride rounds to zero samples");

  std::vector<CpiWindow> out;
  if (end - begin < len) {
    std::cerr << "warning: segment_cpis: span of " << (end - begin) << " frames is shorter than one "
              << len << "-frame window\n";
    return out;
  }
  for (std::size_t s = begin; s + len <= end; s += stride) {
    CpiWindow w;
    w.start = s;
    w.features.resize(kFeatureChannels * len);
    for (std::size_t c = 0; c < kFeatureChannels; ++c) {
      const auto src = ft.channel(c).subspan(s, len);
      std::copy(src.begin(), src.end(), w.features.begin() + static_cast<std::ptrdiff_t>(c * len));
    }
    w.ppg.assign(ppg.begin() + static_cast<std::ptrdiff_t>(s), ppg.begin() + static_cast<std::ptrdiff_t>(s + len));
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<CpiWindow> segment_cpis(const FeatureTensor& ft, std::span<const double> ppg, double window_s,
                                    double stride_s) {
  return segment_cpis(ft, ppg, window_s, stride_s, 0, ft.frames);
}

ProcessedRecording process_recording(const sim::RecordingCube& cube, const FeatureFilters& filters,
                                     const ProcessOptions& options) {
  const RangeTime rt = range_process(cube);
  const auto window = range_window_bins(cube.config, rt.bins, options.search_min_m, options.search_max_m);
  const auto bins = select_chest_bin(rt, window);
  ProcessedRecording out;
  out.chest = extract_chest_series(rt, bins, cube.config);
  out.features = build_features(out.chest, filters, cube.config.prf);
  out.ppg.assign(cube.ppg.begin(), cube.ppg.end());
  out.scenario_label = cube.scenario_label;
  return out;
}

}  // namespace radarppg::pipeline
