// SPDX-License-Identifier: Apache-2.0
#include "radarppg/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "radarppg/errors.hpp"
#include "radarppg/harness/split.hpp"
#include "radarppg/sim/recording_io.hpp"
#include "radarppg/sim/scenario.hpp"

namespace radarppg::harness {

namespace {

std::size_t scenario_index(const ExperimentConfig& c, const std::string& scenario) {
  const auto it = std::find(c.scenarios.begin(), c.scenarios.end(), scenario);
  if (it == c.scenarios.end()) throw ConfigError("scenario '" + scenario + "' is not part of the experiment");
  return static_cast<std::size_t>(it - c.scenarios.begin());
}

std::uint64_t recording_seed(const ExperimentConfig& c, const std::string& scenario, std::size_t index) {
  return c.sim_seed * 1'000'000ULL + (scenario_index(c, scenario) + 1) * 1'000ULL + index;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (scenarios.empty()) throw ConfigError("config: at least one scenario is required");
  std::set<std::string> seen;
  for (const auto& s : scenarios) {
    const auto& known = sim::scenario_names();
    if (std::find(known.begin(), known.end(), s) == known.end()) throw ConfigError("config: unknown scenario '" + s + "'");
    if (!seen.insert(s).second) throw ConfigError("config: scenario '" + s + "' listed twice");
  }
  for (const auto& [name, j] : overrides) {
    if (!seen.count(name)) throw ConfigError("config: override for scenario '" + name + "' that is not run");
    if (!j.is_object()) throw ConfigError("config: override for '" + name + "' must be an object");
  }
  if (recordings_per_scenario == 0) throw ConfigError("config: recordings_per_scenario must be positive");
  if (!(duration_s > 0.0)) throw ConfigError("config: duration_s must be positive");
  double sum = 0.0;
  for (double f : split) {
    if (!(f > 0.0)) throw ConfigError("config: split fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("config: split fractions must sum to 1");
  if (!(window_s > 0.0) || !(stride_s > 0.0)) throw ConfigError("config: window_s and stride_s must be positive");
  if (output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  try {
    radar.validate();
    model.validate();
    for (const auto& s : scenarios)
      for (std::size_t i = 0; i < recordings_per_scenario; ++i) physio_for(s, i).validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  // Every partition of every recording must hold one evaluation window.
  const auto window = static_cast<std::size_t>(std::llround(window_s * radar.prf));
  for (const auto& s : scenarios)
    for (std::size_t i = 0; i < recordings_per_scenario; ++i) {
      const auto frames = static_cast<std::size_t>(std::llround(physio_for(s, i).duration_s * radar.prf));
      split_recording(frames, split, window);
    }
}

sim::PhysioParams ExperimentConfig::physio_for(const std::string& scenario, std::size_t index) const {
  auto p = sim::scenario_preset(scenario);
  p.duration_s = duration_s;
  p.fs = radar.prf;
  if (const auto it = overrides.find(scenario); it != overrides.end()) {
    try {
      p = sim::physio_params_from_json(it->second, p);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: bad override for '" + scenario + "': " + e.what());
    }
  }
  p.seed = recording_seed(*this, scenario, index);
  return p;
}

sim::SynthesisOptions ExperimentConfig::synthesis_for(const std::string& scenario, std::size_t index) const {
  sim::SynthesisOptions o;
  o.base_range_m = base_range_m;
  o.clutter = clutter;
  o.snr_db = snr_db;
  o.seed = recording_seed(*this, scenario, index) ^ 0x9e3779b97f4a7c15ULL;
  o.scenario_label = scenario;
  return o;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  auto clutter = nlohmann::json::array();
  for (const auto& t : c.clutter) clutter.push_back({{"range_m", t.range_m}, {"amplitude", t.amplitude}});
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [k, v] : c.overrides) overrides[k] = v;
  return {{"scenarios", c.scenarios},
          {"recordings_per_scenario", c.recordings_per_scenario},
          {"duration_s", c.duration_s},
          {"overrides", overrides},
          {"radar", sim::radar_config_to_json(c.radar)},
          {"model", model::to_json(c.model)},
          {"split", c.split},
          {"seeds", {{"sim", c.sim_seed}, {"train", c.model.seed}}},
          {"base_range_m", c.base_range_m},
          {"snr_db", std::isfinite(c.snr_db) ? nlohmann::json(c.snr_db) : nlohmann::json(nullptr)},
          {"clutter", clutter},
          {"window_s", c.window_s},
          {"stride_s", c.stride_s},
          {"output_dir", c.output_dir},
          {"write_recordings", c.write_recordings}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  nlohmann::json model_json = nlohmann::json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    try {
      if (k == "scenarios") c.scenarios = v.get<std::vector<std::string>>();
      else if (k == "recordings_per_scenario") c.recordings_per_scenario = v.get<std::size_t>();
      else if (k == "duration_s") c.duration_s = v.get<double>();
      else if (k == "overrides") c.overrides = v.get<std::map<std::string, nlohmann::json>>();
      else if (k == "radar") c.radar = sim::radar_config_from_json(v);
      else if (k == "model") model_json = v;
      else if (k == "split") c.split = v.get<std::array<double, 3>>();
      else if (k == "seeds") {
        c.sim_seed = v.value("sim", c.sim_seed);
        if (v.contains("train")) model_json["seed"] = v.at("train");
      } else if (k == "base_range_m") c.base_range_m = v.get<double>();
      else if (k == "snr_db") c.snr_db = v.is_null() ? sim::SynthesisOptions::kNoiseless : v.get<double>();
      else if (k == "clutter") {
        c.clutter.clear();
        for (const auto& t : v) c.clutter.push_back({t.at("range_m").get<double>(), t.at("amplitude").get<double>()});
      } else if (k == "window_s") c.window_s = v.get<double>();
      else if (k == "stride_s") c.stride_s = v.get<double>();
      else if (k == "output_dir") c.output_dir = v.get<std::string>();
      else if (k == "write_recordings") c.write_recordings = v.get<bool>();
      else throw ConfigError("config: unknown key \"" + k + "\"");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: bad value for \"" + k + "\": " + e.what());
    }
  }
  c.model = model::model_config_from_json(model_json);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return experiment_config_from_json(j);
}

std::string config_hash(const nlohmann::json& j) {
  // Where results are written does not change what is computed.
  nlohmann::json canon = j;
  if (canon.is_object()) canon.erase("output_dir");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string recording_id(const std::string& scenario, std::size_t index) {
  return scenario + "-" + std::to_string(index);
}

}  // namespace radarppg::harness
