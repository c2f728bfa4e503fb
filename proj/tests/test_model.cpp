// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "gradcheck.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/model/norm_stats.hpp"
#include "radarppg/model/ppg_model.hpp"
#include "radarppg/model/trainer.hpp"
#include "radarppg/nn/ops.hpp"
#include "radarppg/pipeline/pipeline.hpp"
#include "radarppg/sim/physio.hpp"
#include "radarppg/sim/radar_sim.hpp"
#include "radarppg/sim/scenario.hpp"
#include "support.hpp"

using namespace radarppg;
using namespace radarppg::model;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.d_model = 16;
  c.heads = 2;
  c.layers = 1;
  c.stem_channels = {8, 16};
  c.d_ff = 32;
  c.dropout = 0.1;
  c.epochs = 3;
  c.batch = 2;
  c.lr = 3e-3;
  return c;
}

// Independent layer-by-layer arithmetic.
std::size_t count_by_hand(const ModelConfig& c) {
  std::size_t n = 0, cin = c.in_channels;
  for (std::size_t cout : c.stem_channels) {
    n += cout * cin * c.stem_kernel + cout;
    cin = cout;
  }
  const std::size_t d = c.d_model;
  const std::size_t attn = 4 * (d * d + d);
  const std::size_t norms = 2 * (2 * d);
  const std::size_t ff = (c.d_ff * d + c.d_ff) + (d * c.d_ff + d);
  n += c.layers * (attn + norms + ff);
  return n + d + 1;
}

std::vector<pipeline::CpiWindow> stationary_windows(double duration_s, double window_s, double stride_s,
                                                    std::uint64_t seed = 1) {
  auto p = sim::scenario_preset("stationary");
  p.duration_s = duration_s;
  p.seed = seed;
  sim::SynthesisOptions o;
  o.seed = seed;
  static const auto filters = pipeline::default_feature_filters(200.0);
  const auto proc = pipeline::process_recording(sim::synthesize_cube({}, sim::generate_physio(p), o), filters);
  return pipeline::segment_cpis(proc.features, proc.ppg, window_s, stride_s);
}

std::vector<float> random_features(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n01;
  std::vector<float> v(8 * frames);
  for (float& x : v) x = n01(rng);
  return v;
}

}  // namespace

TEST_CASE("model config validation and json") {
  ModelConfig c;
  CHECK_NOTHROW(c.validate());
  c.heads = 7;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.stem_channels = {32, 64};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.stem_kernel = 4;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  const auto j = to_json(small_config());
  CHECK(to_json(model_config_from_json(j)) == j);
  CHECK(model_config_from_json({{"epochs", 5}}).epochs == 5);
  CHECK(model_config_from_json({{"epochs", 5}}).d_model == 96);
  CHECK_THROWS_AS(model_config_from_json({{"epoch", 5}}), ConfigError);
}

TEST_CASE("parameter count matches independent arithmetic") {
  for (const auto& c : {ModelConfig{}, small_config()}) {
    const PpgModel<float> m(c);
    CHECK(m.parameter_count() == count_by_hand(c));
    std::size_t total = 0;
    for (const auto& [name, t] : m.named_parameters()) total += t.numel();
    CHECK(total == count_by_hand(c));
  }
  // 25536 stem + 2 x 111840 encoder + 97 head.
  CHECK(count_by_hand(ModelConfig{}) == 249313);
}

TEST_CASE("forward shapes") {
  PpgModel<float> m(ModelConfig{});
  initialize_parameters(m, 7);
  const auto x = random_features(2000, 1);
  CHECK(m.infer(x, 2000).size() == 2000);
  const auto one = random_features(1, 2);
  const auto y1 = m.infer(one, 1);
  CHECK(y1.size() == 1);
  CHECK(std::isfinite(y1[0]));
  CHECK_THROWS_AS(m.forward(nn::Tensor<float>::from({7, 10}, std::vector<float>(70, 0.f))), ShapeError);
  CHECK_THROWS_AS(m.infer(x, 1999), ShapeError);
}

TEST_CASE("initialization") {
  PpgModel<float> m(small_config());
  initialize_parameters(m, 3);
  for (const auto& [name, t] : m.named_parameters()) {
    const auto v = t.values();
    if (name.find("gain") != std::string::npos) {
      for (float x : v) CHECK(x == 1.0f);
    } else if (name.find(".weight") != std::string::npos || name.find(".attn.w") != std::string::npos) {
      std::size_t fan_in = 1;
      for (std::size_t i = 1; i < t.rank(); ++i) fan_in *= t.dim(i);
      const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
      bool nonzero = false;
      for (float x : v) {
        CHECK(std::abs(x) <= bound);
        nonzero |= x != 0.0f;
      }
      CHECK(nonzero);
    } else {
      for (float x : v) CHECK(x == 0.0f);
    }
  }
  PpgModel<float> a(small_config()), b(small_config());
  initialize_parameters(a, 3);
  initialize_parameters(b, 3);
  CHECK(a.snapshot() == b.snapshot());
  initialize_parameters(b, 4);
  CHECK(a.snapshot() != b.snapshot());
}

TEST_CASE("full-model gradient check in double precision") {
  auto c = small_config();
  c.stem_channels = {4, 8};
  c.d_model = 8;
  c.d_ff = 12;
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    PpgModel<double> m(c);
    initialize_parameters(m, s);
    std::mt19937_64 rng(s);
    auto x = testing::random_tensor({8, 6}, rng, 1.0, false);
    std::vector<testing::DTensor> params = m.parameters();
    // Scramble zero biases so every path carries gradient.
    for (auto& p : params)
      for (double& v : p.mutable_values()) v += 0.05 * std::normal_distribution<double>()(rng);
    const auto r = testing::grad_check([&](const auto&) { return m.forward(x); }, params, s);
    worst = std::max(worst, r.max_rel_error);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("normalization statistics") {
  SUBCASE("zero window") {
    pipeline::CpiWindow w;
    w.features.assign(8 * 100, 0.0);
    w.ppg.assign(100, 0.0);
    const auto s = fit_norm_stats(std::vector<pipeline::CpiWindow>{w});
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(s.feature_mean[c] == 0.0);
      CHECK(s.feature_std[c] == kStdFloor);
    }
    CHECK(s.ppg_std == kStdFloor);
  }
  SUBCASE("pooled round trip and order invariance") {
    auto windows = stationary_windows(14.0, 4.0, 2.0);
    REQUIRE(windows.size() == 6);
    const auto s = fit_norm_stats(windows);
    std::array<double, 8> m{}, v{};
    std::size_t n = 0;
    for (const auto& w : windows) {
      const auto z = normalize_features(w.features, w.length(), s);
      for (std::size_t c = 0; c < 8; ++c)
        for (std::size_t t = 0; t < w.length(); ++t) m[c] += z[c * w.length() + t];
      n += w.length();
    }
    for (auto& x : m) x /= static_cast<double>(n);
    for (const auto& w : windows) {
      const auto z = normalize_features(w.features, w.length(), s);
      for (std::size_t c = 0; c < 8; ++c)
        for (std::size_t t = 0; t < w.length(); ++t) v[c] += std::pow(z[c * w.length() + t] - m[c], 2);
    }
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(std::abs(m[c]) < 1e-6);
      if (s.feature_std[c] > kStdFloor) CHECK(std::abs(std::sqrt(v[c] / n) - 1.0) < 1e-4);
    }
    std::reverse(windows.begin(), windows.end());
    const auto r = fit_norm_stats(windows);
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(r.feature_mean[c] == doctest::Approx(s.feature_mean[c]).epsilon(1e-12));
      CHECK(r.feature_std[c] == doctest::Approx(s.feature_std[c]).epsilon(1e-12));
    }
    CHECK(norm_stats_from_json(to_json(s)).ppg_std == s.ppg_std);
    CHECK_THROWS_AS(fit_norm_stats({}), InvalidArgument);
  }
}

TEST_CASE("prediction de-normalizes exactly") {
  PpgModel<float> m(small_config());
  initialize_parameters(m, 1);
  for (auto& [name, t] : m.named_parameters()) {
    auto& mut = const_cast<nn::Tensor<float>&>(t);
    std::fill(mut.mutable_values().begin(), mut.mutable_values().end(), 0.0f);
  }
  const auto& head_b = std::find_if(m.named_parameters().begin(), m.named_parameters().end(),
                                    [](const auto& p) { return p.first == "head.bias"; })->second;
  const_cast<nn::Tensor<float>&>(head_b).mutable_values()[0] = 0.5f;
  NormStats s;
  s.feature_std.fill(1.0);
  s.ppg_mean = 3.0;
  s.ppg_std = 2.0;
  const std::vector<double> feats(8 * 50, 0.25);
  const auto y = predict(m, s, feats, 50);
  CHECK(y.size() == 50);
  for (double v : y) CHECK(v == 4.0);
  CHECK_THROWS_AS(predict(m, std::nullopt, feats, 50), InvalidState);
}

TEST_CASE("inference is dropout free and repeatable") {
  PpgModel<float> m(small_config());
  initialize_parameters(m, 5);
  const auto x = random_features(300, 9);
  const auto ref = m.infer(x, 300);
  for (int i = 0; i < 100; ++i) CHECK(m.infer(x, 300) == ref);
  std::mt19937_64 rng(1);
  const auto xt = nn::Tensor<float>::from({8, 300}, x);
  const auto train_mode = m.forward(xt, true, &rng);
  CHECK_FALSE(std::equal(ref.begin(), ref.end(), train_mode.values().begin()));
}

TEST_CASE("training is deterministic and keeps a full history") {
  auto windows = stationary_windows(12.0, 2.0, 1.0);
  const auto stats = fit_norm_stats(windows);
  auto ex = make_examples(windows, stats);
  const std::vector<TrainingExample> tr(ex.begin(), ex.begin() + 6), va(ex.begin() + 6, ex.begin() + 8);
  auto run = [&] {
    PpgModel<float> m(small_config());
    initialize_parameters(m, 7);
    auto res = train(m, tr, va);
    return std::pair{m.snapshot(), res};
  };
  const auto [p1, r1] = run();
  const auto [p2, r2] = run();
  CHECK(p1 == p2);
  REQUIRE(r1.history.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r1.history[i].epoch == i + 1);
    CHECK(r1.history[i].train_mse == r2.history[i].train_mse);
    CHECK(r1.history[i].val_mse == r2.history[i].val_mse);
  }
  const auto best = std::min_element(r1.history.begin(), r1.history.end(),
                                     [](const auto& a, const auto& b) { return a.val_mse < b.val_mse; });
  CHECK(r1.best_epoch == best->epoch);
  CHECK(r1.best_val_mse == best->val_mse);
  // The restored parameters are the best epoch's.
  PpgModel<float> m(small_config());
  m.restore(p1);
  CHECK(evaluate_mse(m, va) == doctest::Approx(r1.best_val_mse).epsilon(1e-6));
  const auto h = history_to_json(r1.history);
  CHECK(h.size() == 3);
  CHECK(h[0].contains("val_mse"));
}

TEST_CASE("small overfit run settles") {
  auto windows = stationary_windows(8.0, 2.0, 2.0);
  windows.resize(4);
  const auto stats = fit_norm_stats(windows);
  const auto ex = make_examples(windows, stats);
  auto c = small_config();
  c.dropout = 0.0;
  c.epochs = 60;
  c.batch = 4;
  PpgModel<float> m(c);
  initialize_parameters(m, 1);
  const auto res = train(m, ex, {});
  // Smoothed loss after epoch 10 never rises more than 5% above its running minimum.
  std::vector<double> smooth;
  for (std::size_t i = 2; i < res.history.size(); ++i)
    smooth.push_back((res.history[i].train_mse + res.history[i - 1].train_mse + res.history[i - 2].train_mse) / 3);
  double lowest = smooth[8];
  for (std::size_t i = 8; i < smooth.size(); ++i) {
    CHECK(smooth[i] <= 1.05 * lowest);
    lowest = std::min(lowest, smooth[i]);
  }
  CHECK(res.history.back().train_mse < 0.5 * res.history.front().train_mse);
}

TEST_CASE("non-finite loss aborts training") {
  auto windows = stationary_windows(6.0, 2.0, 2.0);
  const auto stats = fit_norm_stats(windows);
  auto ex = make_examples(windows, stats);
  ex[0].target[3] = std::numeric_limits<float>::quiet_NaN();
  PpgModel<float> m(small_config());
  initialize_parameters(m, 1);
  CHECK_THROWS_AS(train(m, ex, {}), PipelineError);
}

TEST_CASE("stitched prediction") {
  PpgModel<float> m(small_config());
  initialize_parameters(m, 2);
  auto p = sim::scenario_preset("stationary");
  p.duration_s = 9.0;
  static const auto filters = pipeline::default_feature_filters(200.0);
  const auto proc = pipeline::process_recording(sim::synthesize_cube({}, sim::generate_physio(p), {}), filters);
  const auto stats = fit_norm_stats(pipeline::segment_cpis(proc.features, proc.ppg, 2.0, 1.0));
  const std::size_t begin = 100, end = 1350, win = 400, stride = 200;
  const auto y = predict_stitched(m, stats, proc.features, begin, end, win, stride);
  REQUIRE(y.size() == end - begin);
  // Manual average of the windows at 100, 300, ..., 900 and the tail at 950.
  std::vector<double> sum(end - begin, 0.0), cnt(end - begin, 0.0);
  std::vector<std::size_t> starts{100, 300, 500, 700, 900, 950};
  for (std::size_t s : starts) {
    std::vector<double> f(8 * win);
    for (std::size_t c = 0; c < 8; ++c)
      for (std::size_t t = 0; t < win; ++t) f[c * win + t] = proc.features.channel(c)[s + t];
    const auto w = predict(m, stats, f, win);
    for (std::size_t t = 0; t < win; ++t) {
      sum[s - begin + t] += w[t];
      cnt[s - begin + t] += 1.0;
    }
  }
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(sum[i] / cnt[i]).epsilon(1e-9));
  CHECK_THROWS(predict_stitched(m, stats, proc.features, 0, 300, win, stride));
}

TEST_CASE("checkpoint save and load") {
  testing::TempDir dir("model");
  PpgModel<float> m(small_config());
  initialize_parameters(m, 11);
  NormStats s;
  s.feature_std.fill(2.0);
  s.ppg_mean = 0.5;
  save_model(dir.file("m.rvnn"), m, s, {{"seed", 11}});
  const auto loaded = load_model(dir.file("m.rvnn"));
  CHECK(loaded.model.snapshot() == m.snapshot());
  CHECK(loaded.stats.ppg_mean == 0.5);
  CHECK(loaded.manifest["seed"] == 11);
  CHECK(to_json(loaded.model.config()) == to_json(m.config()));
  const auto x = random_features(100, 3);
  CHECK(loaded.model.infer(x, 100) == m.infer(x, 100));
}
