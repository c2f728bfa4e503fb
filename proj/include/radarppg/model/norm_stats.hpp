// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include <json.hpp>

#include "radarppg/pipeline/pipeline.hpp"

namespace radarppg::model {

inline constexpr double kStdFloor = 1e-8;

struct NormStats {
  std::array<double, pipeline::kFeatureChannels> feature_mean{};
  std::array<double, pipeline::kFeatureChannels> feature_std{};
  double ppg_mean = 0.0;
  double ppg_std = 1.0;
};

/// Per-channel moments pooled over every sample of every training window.
NormStats fit_norm_stats(std::span<const pipeline::CpiWindow> windows);

/// z-scores a channel-major C x T feature block into float32.
std::vector<float> normalize_features(std::span<const double> features, std::size_t frames, const NormStats& s);
std::vector<float> normalize_ppg(std::span<const double> ppg, const NormStats& s);

nlohmann::json to_json(const NormStats& s);
NormStats norm_stats_from_json(const nlohmann::json& j);

}  // namespace radarppg::model
