// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <numeric>

#include "radarppg/dsp/signal_ops.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/metrics/metrics.hpp"

namespace radarppg::metrics {

namespace {
constexpr double kAhrWeight = 100.0 * 10.0;
constexpr double kHrvWeight = 100.0 / (60.0 * 0.9);
}  // namespace

FomScore weighted_sum(double fom_ahr_weighted, double fom_hrv_weighted) {
  FomScore s;
  s.fom_ahr_weighted = fom_ahr_weighted;
  s.fom_hrv_weighted = fom_hrv_weighted;
  s.score = fom_ahr_weighted + fom_hrv_weighted;
  return s;
}

FomScore fom_and_score(double delta_ahr_bpm, double pearson, double delta_hrv_bpm, double t_cpi_s) {
  if (delta_ahr_bpm < 0.0 || delta_hrv_bpm < 0.0) throw InvalidArgument("fom_and_score: errors must be non-negative");
  if (!(t_cpi_s > 0.0)) throw InvalidArgument("fom_and_score: t_cpi must be positive");
  auto s = weighted_sum(kAhrWeight / (t_cpi_s * std::max(delta_ahr_bpm, kEpsilonBpm)),
                        kHrvWeight * pearson / std::max(delta_hrv_bpm, kEpsilonBpm));
  s.ahr_saturated = delta_ahr_bpm <= kEpsilonBpm;
  s.hrv_saturated = delta_hrv_bpm <= kEpsilonBpm;
  return s;
}

double total_score(std::span<const double> scenario_scores) {
  if (scenario_scores.empty()) throw InvalidArgument("total_score: no scenarios");
  return std::accumulate(scenario_scores.begin(), scenario_scores.end(), 0.0) /
         static_cast<double>(scenario_scores.size());
}

std::vector<double> filtering_baseline(const pipeline::FeatureTensor& ft, std::size_t begin, std::size_t end) {
  if (begin >= end || end > ft.frames) throw InvalidArgument("filtering_baseline: bad frame range");
  const auto ch = ft.channel(pipeline::kHeartBand);
  std::vector<double> out(ch.begin() + static_cast<std::ptrdiff_t>(begin), ch.begin() + static_cast<std::ptrdiff_t>(end));
  dsp::zscore_inplace(out);
  return out;
}

std::vector<double> filtering_baseline(const pipeline::FeatureTensor& ft) {
  return filtering_baseline(ft, 0, ft.frames);
}

}  // namespace radarppg::metrics
