// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "radarppg/pipeline/pipeline.hpp"

namespace radarppg::pipeline {

// RVF1 layout: "RVF1" | u32 H | JSON header {C, T, fs, cpi_start_index,
// scenario_label, recording_id} | C*T float32 (channel-major) | T float32 PPG.

struct FeatureFile {
  FeatureTensor features;
  std::vector<double> ppg;
  std::string scenario_label;
  std::string recording_id;
};

void write_features(const FeatureFile& file, const std::string& path);
FeatureFile read_features(const std::string& path);

}  // namespace radarppg::pipeline
