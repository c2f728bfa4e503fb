// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "radarppg/sim/physio.hpp"

namespace radarppg::sim {

/// "stationary", "deep-breathing" or "rbm". Throws InvalidArgument otherwise.
PhysioParams scenario_preset(const std::string& name);
const std::vector<std::string>& scenario_names();

/// Applies any PhysioParams fields present in `j` on top of `base`.
PhysioParams physio_params_from_json(const nlohmann::json& j, PhysioParams base);
nlohmann::json physio_params_to_json(const PhysioParams& p);

}  // namespace radarppg::sim
