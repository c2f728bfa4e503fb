// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <algorithm>
#include <filesystem>

#include "radarppg/errors.hpp"
#include "radarppg/pipeline/feature_io.hpp"
#include "radarppg/pipeline/pipeline.hpp"
#include "radarppg/sim/physio.hpp"
#include "radarppg/sim/radar_sim.hpp"
#include "radarppg/sim/scenario.hpp"
#include "support.hpp"

using namespace radarppg;
using namespace radarppg::pipeline;
using radarppg::testing::kPi;

namespace {

const FeatureFilters& filters() {
  static const FeatureFilters f = default_feature_filters(200.0);
  return f;
}

sim::SynthesisOptions clean(double range_m = 0.7) {
  sim::SynthesisOptions o;
  o.base_range_m = range_m;
  o.clutter.clear();
  o.snr_db = sim::SynthesisOptions::kNoiseless;
  return o;
}

sim::PhysioTruth flat_truth(std::vector<double> disp) {
  sim::PhysioTruth t;
  t.ppg.assign(disp.size(), 0.0);
  t.rbm_displacement_mm.assign(disp.size(), 0.0);
  t.displacement_mm = std::move(disp);
  return t;
}

// Range-time matrix with a single phasor track at the given bins.
RangeTime phasor_track(std::size_t bins, std::vector<std::size_t> track, std::vector<double> phase) {
  RangeTime rt;
  rt.bins = bins;
  rt.frames = track.size();
  rt.data.assign(bins * rt.frames, {0.0, 0.0});
  for (std::size_t t = 0; t < track.size(); ++t) rt.at(track[t], t) = std::polar(1.0, phase[t]);
  return rt;
}

double energy(const RangeTime& rt) {
  double e = 0.0;
  for (auto z : rt.data) e += std::norm(z);
  return e;
}

// Pre-removal energy of one frame's bin after the fast-time window and padded
// DFT, computed directly.
double windowed_bin_power(const sim::RecordingCube& cube, std::size_t t, std::size_t bin) {
  std::vector<std::complex<double>> frame(128, 0.0);
  for (std::size_t k = 0; k < cube.num_fast; ++k)
    frame[k] = std::complex<double>(cube.at(k, t)) * (0.54 - 0.46 * std::cos(2 * kPi * k / 99.0));
  return std::norm(testing::naive_dft(frame)[bin]);
}

double windowed_frame_energy(const sim::RecordingCube& cube, std::size_t t) {
  double e = 0.0;
  for (std::size_t b = 0; b < 128; ++b) e += windowed_bin_power(cube, t, b);
  return e;
}

}  // namespace

TEST_CASE("range processing dimensions") {
  const auto cube = sim::synthesize_cube({}, flat_truth(std::vector<double>(50, 0.0)), clean());
  const auto rt = range_process(cube);
  CHECK(rt.bins == 128);
  CHECK(rt.frames == 50);
  CHECK(rt.data.size() == 128 * 50);
  auto tiny = cube;
  tiny.num_frames = 1;
  tiny.iq.resize(100);
  tiny.ppg.resize(1);
  CHECK_THROWS(range_process(tiny));
}

TEST_CASE("clutter removal annihilates a static target") {
  auto o = clean(0.5);
  o.clutter = {{0.3, 2.0}, {1.1, 0.5}};
  const auto cube = sim::synthesize_cube({}, flat_truth(std::vector<double>(200, 0.0)), o);
  const auto rt = range_process(cube);
  const double pre = windowed_frame_energy(cube, 0) * 200.0;
  CHECK(energy(rt) < 1e-6 * pre);
}

TEST_CASE("clutter removal keeps an oscillating target") {
  const std::size_t T = 2000, bin = 13;
  std::vector<double> d(T);
  for (std::size_t t = 0; t < T; ++t) d[t] = std::sin(2 * kPi * t / 200.0);
  const auto cube = sim::synthesize_cube({}, flat_truth(d), clean(0.5));
  const auto rt = range_process(cube);
  double before = 0.0, after = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    before += windowed_bin_power(cube, t, bin);
    after += std::norm(rt.at(bin, t));
  }
  CHECK(after > 0.5 * before);
}

TEST_CASE("range window bins") {
  const sim::RadarConfig cfg;
  const auto [lo, hi] = range_window_bins(cfg, 128, 0.2, 1.5);
  const double per_bin = cfg.range_per_bin(128);
  CHECK(per_bin == doctest::Approx(0.0390625).epsilon(1e-3));
  CHECK(static_cast<double>(lo) * per_bin >= 0.2 - per_bin);
  CHECK(static_cast<double>(hi - 1) * per_bin <= 1.5 + 1e-9);
  CHECK(lo < hi);
  CHECK_THROWS_AS(range_window_bins(cfg, 128, 1.0, 0.5), InvalidArgument);
}

TEST_CASE("chest bin selection") {
  SUBCASE("single target") {
    const auto rt = phasor_track(32, std::vector<std::size_t>(20, 10), std::vector<double>(20, 0.3));
    for (auto b : select_chest_bin(rt, {0, 32})) CHECK(b == 10);
  }
  SUBCASE("migrating target is tracked exactly") {
    std::vector<std::size_t> track(40);
    for (std::size_t t = 0; t < 40; ++t) track[t] = 10 + t / 10;
    const auto rt = phasor_track(32, track, std::vector<double>(40, 0.0));
    CHECK(select_chest_bin(rt, {0, 32}) == track);
  }
  SUBCASE("equal power ties keep the previous bin") {
    RangeTime rt = phasor_track(32, std::vector<std::size_t>(10, 5), std::vector<double>(10, 0.0));
    for (std::size_t t = 0; t < 10; ++t) rt.at(9, t) = {0.0, 1.0};
    for (auto b : select_chest_bin(rt, {0, 32})) CHECK(b == 5);
    // Move the track onto bin 9 for one frame, then tie again: it stays at 9.
    rt.at(5, 3) = 0.5;
    const auto bins = select_chest_bin(rt, {0, 32});
    CHECK(bins[2] == 5);
    CHECK(bins[3] == 9);
    CHECK(bins[9] == 9);
  }
  SUBCASE("search window is honored") {
    RangeTime rt = phasor_track(32, std::vector<std::size_t>(5, 3), std::vector<double>(5, 0.0));
    for (std::size_t t = 0; t < 5; ++t) rt.at(12, t) = 0.1;
    for (auto b : select_chest_bin(rt, {8, 20})) CHECK(b == 12);
    CHECK_THROWS_AS(select_chest_bin(rt, {8, 8}), InvalidArgument);
    CHECK_THROWS_AS(select_chest_bin(rt, {8, 33}), InvalidArgument);
  }
}

TEST_CASE("wrap phase") {
  CHECK(wrap_phase(3.5) == doctest::Approx(3.5 - 2 * kPi));
  CHECK(wrap_phase(3.5) == doctest::Approx(-2.783).epsilon(1e-3));
  CHECK(wrap_phase(kPi) == doctest::Approx(-kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(-kPi));
  CHECK(wrap_phase(0.25) == doctest::Approx(0.25));
  for (double x = -20.0; x < 20.0; x += 0.37) {
    const double w = wrap_phase(x);
    CHECK(w >= -kPi);
    CHECK(w < kPi);
    CHECK(std::remainder(x - w, 2 * kPi) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("chest series from synthetic phasors") {
  const sim::RadarConfig cfg;
  SUBCASE("constant phase") {
    const auto rt = phasor_track(16, std::vector<std::size_t>(50, 4), std::vector<double>(50, 1.0));
    const auto cs = extract_chest_series(rt, std::vector<std::size_t>(50, 4), cfg);
    for (std::size_t t = 0; t < 50; ++t) {
      CHECK(cs.velocity_mm_s[t] == 0.0);
      CHECK(std::abs(cs.displacement_mm[t]) < 1e-12);
      CHECK(cs.amplitude[t] == doctest::Approx(1.0));
      CHECK(std::abs(cs.amplitude_db[t]) < 1e-9);
      CHECK_FALSE(cs.migration_flag[t]);
    }
  }
  SUBCASE("constant phase step") {
    std::vector<double> ph(200);
    for (std::size_t t = 0; t < 200; ++t) ph[t] = 0.1 * static_cast<double>(t);
    const auto rt = phasor_track(16, std::vector<std::size_t>(200, 4), ph);
    const auto cs = extract_chest_series(rt, std::vector<std::size_t>(200, 4), cfg);
    CHECK(cs.dphi[0] == 0.0);
    const double expected = cfg.wavelength() * 1e3 * 0.1 * 200.0 / (4 * kPi);
    CHECK(expected == doctest::Approx(6.20).epsilon(1e-3));
    for (std::size_t t = 1; t < 200; ++t) CHECK(cs.velocity_mm_s[t] == doctest::Approx(expected).epsilon(1e-9));
  }
  SUBCASE("large raw step wraps negative") {
    const auto rt = phasor_track(16, {4, 4}, {0.0, 3.5});
    const auto cs = extract_chest_series(rt, std::vector<std::size_t>{4, 4}, cfg);
    CHECK(cs.dphi[1] == doctest::Approx(-2.783).epsilon(1e-3));
    CHECK(cs.velocity_mm_s[1] < 0.0);
  }
  SUBCASE("amplitude floor") {
    RangeTime rt = phasor_track(16, std::vector<std::size_t>(3, 4), std::vector<double>(3, 0.0));
    rt.at(4, 1) = 0.0;
    const auto cs = extract_chest_series(rt, std::vector<std::size_t>(3, 4), cfg);
    CHECK(cs.amplitude_db[1] == doctest::Approx(-240.0));
  }
  SUBCASE("migration flags and interpolation") {
    std::vector<std::size_t> track(30, 4);
    for (std::size_t t = 15; t < 30; ++t) track[t] = 5;
    std::vector<double> ph(30);
    for (std::size_t t = 0; t < 30; ++t) ph[t] = 0.05 * static_cast<double>(t);
    for (std::size_t t = 15; t < 30; ++t) ph[t] += 2.0;  // the new bin has another phase
    const auto rt = phasor_track(16, track, ph);
    const auto cs = extract_chest_series(rt, track, cfg);
    for (std::size_t t = 0; t < 30; ++t) CHECK(cs.migration_flag[t] == (t == 14 || t == 15));
    CHECK(cs.velocity_refined_mm_s[14] == doctest::Approx(cs.velocity_mm_s[13]));
    CHECK(cs.velocity_refined_mm_s[15] == doctest::Approx(cs.velocity_mm_s[16]));
    for (std::size_t t = 0; t < 30; ++t)
      if (!cs.migration_flag[t]) CHECK(cs.velocity_refined_mm_s[t] == cs.velocity_mm_s[t]);
  }
  SUBCASE("every frame flagged") {
    const auto rt = phasor_track(16, {1, 2, 3, 4}, {0, 0, 0, 0});
    CHECK_THROWS_AS(extract_chest_series(rt, std::vector<std::size_t>{1, 2, 3, 4}, cfg), PipelineError);
  }
  SUBCASE("bad bin track") {
    const auto rt = phasor_track(16, {1, 1, 1}, {0, 0, 0});
    CHECK_THROWS_AS(extract_chest_series(rt, std::vector<std::size_t>{1, 1}, cfg), ShapeError);
    CHECK_THROWS_AS(extract_chest_series(rt, std::vector<std::size_t>{1, 1, 16}, cfg), InvalidArgument);
  }
}

TEST_CASE("chest series invariants on a simulated recording") {
  sim::PhysioParams p = sim::scenario_preset("stationary");
  p.duration_s = 20.0;
  const auto proc = process_recording(sim::synthesize_cube({}, sim::generate_physio(p), {}), filters());
  const auto& cs = proc.chest;
  REQUIRE(cs.size() == 4000);
  CHECK(cs.dphi.size() == 4000);
  CHECK(cs.migration_flag.size() == 4000);
  double mean = std::accumulate(cs.displacement_mm.begin(), cs.displacement_mm.end(), 0.0) / 4000.0;
  CHECK(std::abs(mean) < 1e-9);
  for (double d : cs.dphi) {
    CHECK(d >= -kPi);
    CHECK(d < kPi);
  }
  // diff(displacement) * PRF reproduces velocity_refined.
  double worst = 0.0;
  for (std::size_t t = 1; t < cs.size(); ++t)
    worst = std::max(worst, std::abs((cs.displacement_mm[t] - cs.displacement_mm[t - 1]) * 200.0 - cs.velocity_refined_mm_s[t]));
  CHECK(worst < 1e-9);
}

TEST_CASE("displacement oracle where the mean phasor vanishes") {
  // Clutter removal subtracts the slow-time mean of the chest phasor, which
  // for a sinusoidal swing of amplitude a is J0(4*pi*a/lambda). Near a zero of
  // J0 the subtraction is harmless and the recovered displacement matches.
  for (double amp : {3.65, 4.63}) {
    sim::PhysioParams p;
    p.duration_s = 60.0;
    p.resp_amp_mm = amp;
    p.heart_sound_amp_mm = 0.0;
    const auto truth = sim::generate_physio(p);
    const auto proc = process_recording(sim::synthesize_cube({}, truth, clean()), filters());
    CHECK(testing::rmse(proc.chest.displacement_mm, testing::demean(truth.displacement_mm)) < 0.02);
  }
}

namespace {

ChestSeries series_from_velocity(std::vector<double> v) {
  ChestSeries cs;
  const std::size_t n = v.size();
  cs.bin_index.assign(n, 10);
  cs.amplitude.assign(n, 1.0);
  cs.amplitude_db.assign(n, 0.0);
  cs.dphi.assign(n, 0.0);
  cs.migration_flag.assign(n, false);
  cs.velocity_mm_s = v;
  cs.velocity_refined_mm_s = v;
  cs.displacement_mm.assign(n, 0.0);
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) cs.displacement_mm[t] = (acc += v[t] / 200.0);
  const double m = acc == 0.0 ? 0.0 : std::accumulate(cs.displacement_mm.begin(), cs.displacement_mm.end(), 0.0) / n;
  for (double& d : cs.displacement_mm) d -= m;
  return cs;
}

}  // namespace

TEST_CASE("feature tensor shape and channel contracts") {
  std::vector<double> v(3000, 0.0);
  v[1500] = 50.0;
  const auto ft = build_features(series_from_velocity(v), filters(), 200.0);
  CHECK(ft.frames == 3000);
  CHECK(ft.channels.size() == 8 * 3000);
  // 0.2 s max filter, 41 samples, centered on the fast frame.
  for (std::size_t t = 1480; t <= 1520; ++t) CHECK(ft.channel(kRbmIndicator)[t] >= 0.993);
  CHECK(ft.channel(kRbmIndicator)[1470] < 0.01);
  for (double x : ft.channel(kRbmIndicator)) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
  }
  for (double x : ft.channel(kMigrationFlag)) CHECK(x == 0.0);
}

TEST_CASE("zero velocity gives constant features") {
  auto cs = series_from_velocity(std::vector<double>(2500, 0.0));
  for (std::size_t t = 0; t < cs.size(); ++t) cs.amplitude_db[t] = std::sin(0.01 * t);
  const auto ft = build_features(cs, filters(), 200.0);
  for (std::size_t c = 0; c < kFeatureChannels; ++c) {
    if (c == kAmplitudeDb) continue;
    const auto ch = ft.channel(c);
    for (double x : ch) CHECK(x == doctest::Approx(ch[0]).epsilon(1e-12));
  }
  CHECK(ft.channel(kRbmIndicator)[0] == doctest::Approx(1.0 / (1.0 + std::exp(5.0))));
  CHECK(ft.channel(kRbmIndicator)[0] < 0.01);
  CHECK(ft.channel(kAmplitudeDb)[7] == doctest::Approx(std::sin(0.07)));
}

TEST_CASE("migration flags reach the last channel") {
  auto cs = series_from_velocity(std::vector<double>(2500, 0.0));
  cs.migration_flag[100] = cs.migration_flag[101] = true;
  const auto ft = build_features(cs, filters(), 200.0);
  CHECK(ft.channel(kMigrationFlag)[100] == 1.0);
  CHECK(ft.channel(kMigrationFlag)[101] == 1.0);
  CHECK(std::accumulate(ft.channel(kMigrationFlag).begin(), ft.channel(kMigrationFlag).end(), 0.0) == 2.0);
}

TEST_CASE("build_features rejects mismatched filters") {
  const auto cs = series_from_velocity(std::vector<double>(500, 0.0));
  auto f = filters();
  f.heart = dsp::design_fir(dsp::FilterKind::BandPass, {0.8, 2.0}, 200.0, 1001);
  CHECK_THROWS_AS(build_features(cs, f, 200.0), InvalidArgument);
  f = filters();
  f.sound = dsp::design_fir(dsp::FilterKind::HighPass, {30.0, std::nullopt}, 200.0, 201);
  CHECK_THROWS_AS(build_features(cs, f, 200.0), InvalidArgument);
  CHECK_THROWS_AS(build_features(cs, filters(), 100.0), InvalidArgument);
}

TEST_CASE("band channels are filtered displacement") {
  const std::size_t n = 4000;
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; ++t) v[t] = 2 * kPi * 1.2 * 0.3 * std::cos(2 * kPi * 1.2 * t / 200.0);
  const auto cs = series_from_velocity(v);
  const auto ft = build_features(cs, filters(), 200.0);
  const auto heart = dsp::filtfilt_odd_pad(filters().heart, cs.displacement_mm);
  for (std::size_t t = 0; t < n; ++t) CHECK(ft.channel(kHeartBand)[t] == doctest::Approx(heart[t]));
  for (std::size_t t = 0; t < n; ++t) CHECK(ft.channel(kDisplacement)[t] == cs.displacement_mm[t]);
  for (std::size_t t = 0; t < n; ++t) CHECK(ft.channel(kVelocity)[t] == cs.velocity_refined_mm_s[t]);
}

TEST_CASE("cpi segmentation") {
  FeatureTensor ft;
  ft.frames = 12000;
  ft.channels.resize(8 * 12000);
  std::iota(ft.channels.begin(), ft.channels.end(), 0.0);
  std::vector<double> ppg(12000);
  std::iota(ppg.begin(), ppg.end(), 0.0);
  const auto w = segment_cpis(ft, ppg, 10.0, 1.0);
  CHECK(w.size() == 51);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(w[i].start == i * 200);
    CHECK(w[i].length() == 2000);
    CHECK(w[i].ppg.front() == static_cast<double>(i * 200));
    for (std::size_t c = 0; c < 8; ++c) CHECK(w[i].features[c * 2000] == static_cast<double>(c * 12000 + i * 200));
  }
  FeatureTensor shortft;
  shortft.frames = 2000;
  shortft.channels.assign(8 * 2000, 0.0);
  CHECK(segment_cpis(shortft, std::vector<double>(2000, 0.0), 10.0, 3.0).size() == 1);
  CHECK(segment_cpis(shortft, std::vector<double>(2000, 0.0), 10.0, 0.25).size() == 1);
  CHECK(segment_cpis(ft, ppg, 10.0, 1.0, 0, 1999).empty());
  const auto part = segment_cpis(ft, ppg, 10.0, 2.0, 1000, 5000);
  CHECK(part.size() == 6);
  CHECK(part.back().start + 2000 == 5000);
  CHECK(part[1].start == 1400);
  CHECK_THROWS_AS(segment_cpis(ft, ppg, 10.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(segment_cpis(ft, std::vector<double>(10, 0.0), 10.0, 1.0), ShapeError);
}

TEST_CASE("migration robustness on a body-motion recording") {
  sim::PhysioParams p = sim::scenario_preset("rbm");
  p.duration_s = 40.0;
  p.seed = 11;
  const auto truth = sim::generate_physio(p);
  const auto proc = process_recording(sim::synthesize_cube({}, truth, clean()), filters());
  const auto [lo, hi] = std::minmax_element(proc.chest.bin_index.begin(), proc.chest.bin_index.end());
  REQUIRE(*hi - *lo >= 2);
  double flagged = 0.0;
  for (bool f : proc.chest.migration_flag) flagged += f;
  CHECK(flagged > 0.0);
  CHECK(flagged < static_cast<double>(proc.chest.size()));
}

TEST_CASE("feature file round trip") {
  testing::TempDir dir("rvf");
  sim::PhysioParams p;
  p.duration_s = 12.0;
  auto proc = process_recording(sim::synthesize_cube({}, sim::generate_physio(p), {}), filters());
  FeatureFile f{proc.features, proc.ppg, "stationary", "stationary-0"};
  write_features(f, dir.file("a.rvf"));
  const auto back = read_features(dir.file("a.rvf"));
  CHECK(back.features.frames == f.features.frames);
  CHECK(back.scenario_label == "stationary");
  CHECK(back.recording_id == "stationary-0");
  for (std::size_t i = 0; i < f.features.channels.size(); ++i)
    CHECK(back.features.channels[i] == static_cast<double>(static_cast<float>(f.features.channels[i])));
  for (std::size_t i = 0; i < f.ppg.size(); ++i) CHECK(back.ppg[i] == static_cast<double>(static_cast<float>(f.ppg[i])));

  std::filesystem::resize_file(dir.file("a.rvf"), std::filesystem::file_size(dir.file("a.rvf")) - 4);
  CHECK_THROWS_AS(read_features(dir.file("a.rvf")), FormatError);
  f.ppg.pop_back();
  CHECK_THROWS_AS(write_features(f, dir.file("b.rvf")), ShapeError);
}
