// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarppg/model/norm_stats.hpp"
#include "radarppg/model/ppg_model.hpp"

namespace radarppg::model {

/// A z-scored training example: C x T features and T targets.
struct TrainingExample {
  std::size_t frames = 0;
  std::vector<float> features;
  std::vector<float> target;
};

std::vector<TrainingExample> make_examples(std::span<const pipeline::CpiWindow> windows, const NormStats& stats);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;  // NaN without validation data
  double wall_time_s = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_mse = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch AdamW on the mean per-window MSE. Window order is reshuffled
/// each epoch from config.seed. The model ends up holding the parameters
/// of the epoch with the lowest validation MSE (lowest training MSE when
/// no validation windows are given). Throws PipelineError on a non-finite
/// training loss.
TrainResult train(PpgModel<float>& model, std::span<const TrainingExample> train_set,
                  std::span<const TrainingExample> val_set, const EpochCallback& on_epoch = {});

double evaluate_mse(const PpgModel<float>& model, std::span<const TrainingExample> examples);

nlohmann::json history_to_json(const std::vector<EpochRecord>& history);

/// z-score, forward in inference mode, de-normalize to reference units.
std::vector<double> predict(const PpgModel<float>& model, const std::optional<NormStats>& stats,
                            std::span<const double> features, std::size_t frames);

/// Predicts over [begin, end) of a recording with windows of `window` frames
/// every `stride` frames, plus a final window flush with `end` when the
/// stride leaves a remainder. Overlapping outputs are averaged.
std::vector<double> predict_stitched(const PpgModel<float>& model, const NormStats& stats,
                                     const pipeline::FeatureTensor& ft, std::size_t begin, std::size_t end,
                                     std::size_t window, std::size_t stride);

struct LoadedModel {
  PpgModel<float> model;
  NormStats stats;
  nlohmann::json manifest;
};

void save_model(const std::string& path, const PpgModel<float>& model, const NormStats& stats,
                const nlohmann::json& extra_manifest = {});
LoadedModel load_model(const std::string& path);

}  // namespace radarppg::model
