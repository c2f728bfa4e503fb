// SPDX-License-Identifier: Apache-2.0
#include "radarppg/model/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "radarppg/errors.hpp"
#include "radarppg/nn/adamw.hpp"
#include "radarppg/nn/checkpoint.hpp"
#include "radarppg/nn/ops.hpp"

namespace radarppg::model {

using pipeline::kFeatureChannels;

std::vector<TrainingExample> make_examples(std::span<const pipeline::CpiWindow> windows, const NormStats& stats) {
  std::vector<TrainingExample> out;
  out.reserve(windows.size());
  for (const auto& w : windows) {
    TrainingExample e;
    e.frames = w.length();
    e.features = normalize_features(w.features, e.frames, stats);
    e.target = normalize_ppg(w.ppg, stats);
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

nn::Tensor<float> input_tensor(const TrainingExample& e) {
  return nn::Tensor<float>::from({kFeatureChannels, e.frames}, e.features);
}

void check_examples(std::span<const TrainingExample> xs, const char* what) {
  for (const auto& e : xs)
    if (e.frames == 0 || e.features.size() != kFeatureChannels * e.frames || e.target.size() != e.frames)
      throw ShapeError(std::string("train: malformed ") + what + " example");
}

}  // namespace

double evaluate_mse(const PpgModel<float>& model, std::span<const TrainingExample> examples) {
  if (examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (const auto& e : examples) {
    const auto y = model.forward(input_tensor(e), false, nullptr);
    total += static_cast<double>(nn::mse_loss(y, std::span<const float>(e.target)).item());
  }
  return total / static_cast<double>(examples.size());
}

TrainResult train(PpgModel<float>& model, std::span<const TrainingExample> train_set,
                  std::span<const TrainingExample> val_set, const EpochCallback& on_epoch) {
  const auto& cfg = model.config();
  if (train_set.empty()) throw InvalidArgument("train: no training windows");
  check_examples(train_set, "training");
  check_examples(val_set, "validation");

  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x5eedf00dULL);
  std::mt19937_64 dropout_rng(cfg.seed + 1);
  nn::AdamWState<float> opt;
  opt.lr = cfg.lr;
  opt.weight_decay = cfg.weight_decay;
  auto params = model.parameters();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  double best = std::numeric_limits<double>::infinity();
  auto best_values = model.snapshot();
  const auto t0 = std::chrono::steady_clock::now();

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const auto stop = std::min(order.size(), start + cfg.batch);
      const float seed = 1.0f / static_cast<float>(stop - start);
      model.zero_grad();
      for (std::size_t i = start; i < stop; ++i) {
        const auto& e = train_set[order[i]];
        const auto y = model.forward(input_tensor(e), true, &dropout_rng);
        const auto loss = nn::mse_loss(y, std::span<const float>(e.target));
        const double l = loss.item();
        if (!std::isfinite(l)) {
          std::ostringstream msg;
          msg << "train: non-finite loss at epoch " << epoch + 1 << ", batch starting at " << start
              << " (window " << order[i] << ", lr " << cfg.lr << ")";
          throw PipelineError(msg.str());
        }
        loss_sum += l;
        loss.backward(seed);
      }
      nn::adamw_step(opt, params);
    }

    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.train_mse = loss_sum / static_cast<double>(order.size());
    rec.val_mse = evaluate_mse(model, val_set);
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    const double criterion = val_set.empty() ? rec.train_mse : rec.val_mse;
    if (criterion < best) {
      best = criterion;
      result.best_epoch = rec.epoch;
      best_values = model.snapshot();
    }
  }
  model.zero_grad();
  if (result.best_epoch > 0) model.restore(best_values);
  result.best_val_mse = best;
  return result;
}

nlohmann::json history_to_json(const std::vector<EpochRecord>& history) {
  auto arr = nlohmann::json::array();
  for (const auto& r : history) {
    nlohmann::json val = std::isfinite(r.val_mse) ? nlohmann::json(r.val_mse) : nlohmann::json(nullptr);
    arr.push_back({{"epoch", r.epoch}, {"train_mse", r.train_mse}, {"val_mse", val}, {"wall_time", r.wall_time_s}});
  }
  return arr;
}

std::vector<double> predict(const PpgModel<float>& model, const std::optional<NormStats>& stats,
                            std::span<const double> features, std::size_t frames) {
  if (!stats) throw InvalidState("predict: model has no normalization statistics");
  const auto x = normalize_features(features, frames, *stats);
  const auto y = model.infer(x, frames);
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = static_cast<double>(y[i]) * stats->ppg_std + stats->ppg_mean;
  return out;
}

std::vector<double> predict_stitched(const PpgModel<float>& model, const NormStats& stats,
                                     const pipeline::FeatureTensor& ft, std::size_t begin, std::size_t end,
                                     std::size_t window, std::size_t stride) {
  if (end > ft.frames || begin >= end) throw InvalidArgument("predict_stitched: bad frame range");
  if (window == 0 || stride == 0) throw InvalidArgument("predict_stitched: window and stride must be positive");
  if (end - begin < window) throw InvalidArgument("predict_stitched: range is shorter than one window");

  std::vector<std::size_t> starts;
  for (std::size_t s = begin; s + window <= end; s += stride) starts.push_back(s);
  if (starts.back() + window < end) starts.push_back(end - window);

  const auto n = end - begin;
  std::vector<double> acc(n, 0.0), count(n, 0.0);
  std::vector<double> buf(kFeatureChannels * window);
  for (auto s : starts) {
    for (std::size_t c = 0; c < kFeatureChannels; ++c) {
      const auto ch = ft.channel(c);
      std::copy(ch.begin() + static_cast<std::ptrdiff_t>(s), ch.begin() + static_cast<std::ptrdiff_t>(s + window),
                buf.begin() + static_cast<std::ptrdiff_t>(c * window));
    }
    const auto y = predict(model, stats, buf, window);
    for (std::size_t i = 0; i < window; ++i) {
      acc[s - begin + i] += y[i];
      count[s - begin + i] += 1.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) acc[i] /= count[i];
  return acc;
}

void save_model(const std::string& path, const PpgModel<float>& model, const NormStats& stats,
                const nlohmann::json& extra_manifest) {
  nn::Checkpoint ck;
  ck.manifest = extra_manifest.is_object() ? extra_manifest : nlohmann::json::object();
  ck.manifest["model_config"] = to_json(model.config());
  ck.manifest["norm_stats"] = to_json(stats);
  for (const auto& [name, t] : model.named_parameters())
    ck.arrays.push_back({name, t.shape(), std::vector<float>(t.values().begin(), t.values().end())});
  nn::save_checkpoint(path, ck);
}

LoadedModel load_model(const std::string& path) {
  auto ck = nn::load_checkpoint(path);
  if (!ck.manifest.contains("model_config") || !ck.manifest.contains("norm_stats"))
    throw FormatError("checkpoint " + path + " lacks model_config or norm_stats", 0);
  ModelConfig cfg;
  try {
    cfg = model_config_from_json(ck.manifest.at("model_config"));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint model_config: ") + e.what(), 0);
  }
  LoadedModel out{PpgModel<float>(cfg), norm_stats_from_json(ck.manifest.at("norm_stats")), ck.manifest};
  if (ck.arrays.size() != out.model.named_parameters().size())
    throw FormatError("checkpoint " + path + " has " + std::to_string(ck.arrays.size()) + " tensors, model needs " +
                          std::to_string(out.model.named_parameters().size()),
                      0);
  for (const auto& [name, t0] : out.model.named_parameters()) {
    const auto& a = ck.find(name);
    if (a.shape != t0.shape())
      throw FormatError("checkpoint tensor " + name + " has shape " + nn::shape_string(a.shape) + ", expected " +
                            nn::shape_string(t0.shape()),
                        0);
    auto t = t0;
    std::copy(a.values.begin(), a.values.end(), t.mutable_values().begin());
  }
  return out;
}

}  // namespace radarppg::model
