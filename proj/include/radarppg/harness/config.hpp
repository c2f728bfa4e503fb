// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "radarppg/model/ppg_model.hpp"
#include "radarppg/sim/physio.hpp"
#include "radarppg/sim/radar_sim.hpp"

namespace radarppg::harness {

struct ExperimentConfig {
  std::vector<std::string> scenarios{"stationary", "deep-breathing", "rbm"};
  std::size_t recordings_per_scenario = 3;
  double duration_s = 70.0;
  /// Per-scenario PhysioParams fields, applied over the scenario preset.
  std::map<std::string, nlohmann::json> overrides;
  sim::RadarConfig radar;
  model::ModelConfig model;
  std::array<double, 3> split{0.70, 0.15, 0.15};
  std::uint64_t sim_seed = 1;
  double base_range_m = 0.7;
  double snr_db = 20.0;
  std::vector<sim::ClutterTarget> clutter{{0.3, 2.0}};
  double window_s = 10.0;
  double stride_s = 1.0;
  std::string output_dir = "run";
  bool write_recordings = true;

  /// Throws ConfigError.
  void validate() const;
  /// Physio parameters of recording `index` of `scenario`, seed included.
  sim::PhysioParams physio_for(const std::string& scenario, std::size_t index) const;
  sim::SynthesisOptions synthesis_for(const std::string& scenario, std::size_t index) const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// 64-bit FNV-1a of the canonical (key-sorted, compact) JSON without
/// output_dir, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

std::string recording_id(const std::string& scenario, std::size_t index);

}  // namespace radarppg::harness
