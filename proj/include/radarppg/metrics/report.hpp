// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace radarppg::metrics {

struct ScoreRow {
  std::string scenario;
  std::string method;  // "model", "baseline", or a free label
  double delta_ahr_bpm = 0.0;
  double delta_hrv_bpm = 0.0;
  double pearson = 0.0;
  double fom_ahr_w = 0.0;
  double fom_hrv_w = 0.0;
  double score = 0.0;
  std::size_t ahr_frames_excluded = 0;
  std::vector<std::string> flags;  // e.g. "ahr_saturated", "hrv_undefined"
};

struct ScoreReport {
  std::vector<ScoreRow> rows;
  nlohmann::json metadata = nlohmann::json::object();

  /// Mean score over the scenarios of each method.
  std::map<std::string, double> total_scores() const;
};

nlohmann::json to_json(const ScoreReport& r);
ScoreReport score_report_from_json(const nlohmann::json& j);

/// Columns: scenario, delta_ahr_bpm, delta_hrv_bpm, pearson, fom_ahr_w,
/// fom_hrv_w, score, flags, method. Flags are joined with ';'.
std::string to_csv(const ScoreReport& r);

void write_report(const ScoreReport& r, const std::string& json_path, const std::string& csv_path);

}  // namespace radarppg::metrics
