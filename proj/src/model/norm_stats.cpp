// SPDX-License-Identifier: Apache-2.0
#include "radarppg/model/norm_stats.hpp"

#include <algorithm>
#include <cmath>

#include "radarppg/errors.hpp"

namespace radarppg::model {

namespace {

// Two-pass pooled moments; sums are accumulated in window order, which
// only perturbs the last few ulps when the order changes.
struct Moments {
  double sum = 0.0;
  std::size_t n = 0;
};

}  // namespace

NormStats fit_norm_stats(std::span<const pipeline::CpiWindow> windows) {
  using pipeline::kFeatureChannels;
  if (windows.empty()) throw InvalidArgument("fit_norm_stats: no training windows");
  NormStats s;
  std::array<Moments, kFeatureChannels> fm{};
  Moments pm;
  for (const auto& w : windows) {
    const auto len = w.length();
    if (w.features.size() != kFeatureChannels * len) throw ShapeError("fit_norm_stats: window feature size mismatch");
    for (std::size_t c = 0; c < kFeatureChannels; ++c) {
      for (std::size_t i = 0; i < len; ++i) fm[c].sum += w.features[c * len + i];
      fm[c].n += len;
    }
    for (double p : w.ppg) pm.sum += p;
    pm.n += len;
  }
  if (pm.n == 0) throw InvalidArgument("fit_norm_stats: training windows are empty");
  for (std::size_t c = 0; c < kFeatureChannels; ++c) s.feature_mean[c] = fm[c].sum / static_cast<double>(fm[c].n);
  s.ppg_mean = pm.sum / static_cast<double>(pm.n);

  std::array<double, kFeatureChannels> ss{};
  double pss = 0.0;
  for (const auto& w : windows) {
    const auto len = w.length();
    for (std::size_t c = 0; c < kFeatureChannels; ++c)
      for (std::size_t i = 0; i < len; ++i) {
        const double d = w.features[c * len + i] - s.feature_mean[c];
        ss[c] += d * d;
      }
    for (double p : w.ppg) pss += (p - s.ppg_mean) * (p - s.ppg_mean);
  }
  for (std::size_t c = 0; c < kFeatureChannels; ++c)
    s.feature_std[c] = std::max(std::sqrt(ss[c] / static_cast<double>(fm[c].n)), kStdFloor);
  s.ppg_std = std::max(std::sqrt(pss / static_cast<double>(pm.n)), kStdFloor);
  return s;
}

std::vector<float> normalize_features(std::span<const double> features, std::size_t frames, const NormStats& s) {
  using pipeline::kFeatureChannels;
  if (features.size() != kFeatureChannels * frames) throw ShapeError("normalize_features: expected 8 x T values");
  std::vector<float> out(features.size());
  for (std::size_t c = 0; c < kFeatureChannels; ++c)
    for (std::size_t i = 0; i < frames; ++i)
      out[c * frames + i] = static_cast<float>((features[c * frames + i] - s.feature_mean[c]) / s.feature_std[c]);
  return out;
}

std::vector<float> normalize_ppg(std::span<const double> ppg, const NormStats& s) {
  std::vector<float> out(ppg.size());
  for (std::size_t i = 0; i < ppg.size(); ++i) out[i] = static_cast<float>((ppg[i] - s.ppg_mean) / s.ppg_std);
  return out;
}

nlohmann::json to_json(const NormStats& s) {
  return {{"feature_mean", s.feature_mean},
          {"feature_std", s.feature_std},
          {"ppg_mean", s.ppg_mean},
          {"ppg_std", s.ppg_std}};
}

NormStats norm_stats_from_json(const nlohmann::json& j) {
  try {
    NormStats s;
    s.feature_mean = j.at("feature_mean").get<std::array<double, pipeline::kFeatureChannels>>();
    s.feature_std = j.at("feature_std").get<std::array<double, pipeline::kFeatureChannels>>();
    s.ppg_mean = j.at("ppg_mean").get<double>();
    s.ppg_std = j.at("ppg_std").get<double>();
    for (double v : s.feature_std)
      if (!(v > 0.0)) throw FormatError("norm stats: feature_std entries must be positive", 0);
    if (!(s.ppg_std > 0.0)) throw FormatError("norm stats: ppg_std must be positive", 0);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("norm stats: ") + e.what(), 0);
  }
}

}  // namespace radarppg::model
