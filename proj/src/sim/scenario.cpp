// SPDX-License-Identifier: Apache-2.0
#include "radarppg/sim/scenario.hpp"

#include "radarppg/errors.hpp"

namespace radarppg::sim {

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"stationary", "deep-breathing", "rbm"};
  return names;
}

PhysioParams scenario_preset(const std::string& name) {
  PhysioParams p;
  if (name == "stationary") return p;
  if (name == "deep-breathing") {
    p.resp_amp_mm = 10.0;
    p.resp_freq_hz = 0.2;
    return p;
  }
  if (name == "rbm") {
    p.rbm_enabled = true;
    p.rbm_v_max_mm_s = 60.0;
    return p;
  }
  throw InvalidArgument("unknown scenario '" + name + "' (expected stationary, deep-breathing or rbm)");
}

PhysioParams physio_params_from_json(const nlohmann::json& j, PhysioParams p) {
  p.duration_s = j.value("duration_s", p.duration_s);
  p.fs = j.value("fs", p.fs);
  p.resp_amp_mm = j.value("resp_amp_mm", p.resp_amp_mm);
  p.resp_freq_hz = j.value("resp_freq_hz", p.resp_freq_hz);
  p.heart_amp_mm = j.value("heart_amp_mm", p.heart_amp_mm);
  p.heart_freq_hz = j.value("heart_freq_hz", p.heart_freq_hz);
  p.heart_sound_amp_mm = j.value("heart_sound_amp_mm", p.heart_sound_amp_mm);
  if (j.contains("heart_sound_band")) {
    const auto& b = j.at("heart_sound_band");
    p.heart_sound_band = {b.at(0).get<double>(), b.at(1).get<double>()};
  }
  p.rbm_enabled = j.value("rbm_enabled", p.rbm_enabled);
  p.rbm_v_max_mm_s = j.value("rbm_v_max_mm_s", p.rbm_v_max_mm_s);
  p.rbm_burst_rate_hz = j.value("rbm_burst_rate_hz", p.rbm_burst_rate_hz);
  p.hr_jitter_frac = j.value("hr_jitter_frac", p.hr_jitter_frac);
  p.seed = j.value("seed", p.seed);
  return p;
}

nlohmann::json physio_params_to_json(const PhysioParams& p) {
  return {{"duration_s", p.duration_s},
          {"fs", p.fs},
          {"resp_amp_mm", p.resp_amp_mm},
          {"resp_freq_hz", p.resp_freq_hz},
          {"heart_amp_mm", p.heart_amp_mm},
          {"heart_freq_hz", p.heart_freq_hz},
          {"heart_sound_amp_mm", p.heart_sound_amp_mm},
          {"heart_sound_band", {p.heart_sound_band.first, p.heart_sound_band.second}},
          {"rbm_enabled", p.rbm_enabled},
          {"rbm_v_max_mm_s", p.rbm_v_max_mm_s},
          {"rbm_burst_rate_hz", p.rbm_burst_rate_hz},
          {"hr_jitter_frac", p.hr_jitter_frac},
          {"seed", p.seed}};
}

}  // namespace radarppg::sim
