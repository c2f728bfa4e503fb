// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarppg/harness/config.hpp"
#include "radarppg/harness/split.hpp"
#include "radarppg/metrics/report.hpp"
#include "radarppg/model/trainer.hpp"
#include "radarppg/pipeline/pipeline.hpp"

namespace radarppg::harness {

using Logger = std::function<void(const std::string&)>;

struct PreparedRecording {
  std::string id;
  std::string scenario;
  pipeline::FeatureTensor features;
  std::vector<double> ppg;
  SplitRanges split;
};

struct PreparedData {
  std::vector<PreparedRecording> recordings;
  std::vector<pipeline::CpiWindow> train_windows, val_windows;
};

/// Simulates and processes every recording of the config. Artifacts go to
/// <output_dir>/recordings and <output_dir>/features when `write` is set.
PreparedData prepare_data(const ExperimentConfig& cfg, bool write, const Logger& log = {});

/// Splits prepared recordings and cuts training/validation windows.
void cut_windows(PreparedData& data, const ExperimentConfig& cfg);

struct TrainedModel {
  model::PpgModel<float> model;
  model::NormStats stats;
  model::TrainResult result;
};

TrainedModel fit_model(const ExperimentConfig& cfg, const PreparedData& data, const Logger& log = {});

/// Scores the model and the filtering baseline on the test partition of
/// every recording, pooled per scenario. Rows are ordered by scenario
/// (in first-seen order), model before baseline.
metrics::ScoreReport evaluate(const model::PpgModel<float>& model, const model::NormStats& stats,
                              const std::vector<PreparedRecording>& recordings, double window_s, double stride_s);

struct ExperimentResult {
  metrics::ScoreReport report;
  nlohmann::json manifest;
  std::vector<model::EpochRecord> history;
};

/// Full run: simulate -> process -> split -> fit stats -> train -> score.
/// Writes recordings, features, model.rvnn, history.json, report.json,
/// report.csv and manifest.json under cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Logger& log = {});

}  // namespace radarppg::harness
