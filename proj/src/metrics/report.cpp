// SPDX-License-Identifier: Apache-2.0
#include "radarppg/metrics/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "radarppg/errors.hpp"
#include "radarppg/metrics/metrics.hpp"

namespace radarppg::metrics {

std::map<std::string, double> ScoreReport::total_scores() const {
  std::map<std::string, std::vector<double>> by_method;
  for (const auto& row : rows) by_method[row.method].push_back(row.score);
  std::map<std::string, double> out;
  for (const auto& [m, s] : by_method) out[m] = total_score(s);
  return out;
}

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_or_nan(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

nlohmann::json to_json(const ScoreReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"scenario", row.scenario},
                    {"method", row.method},
                    {"delta_ahr_bpm", number_or_null(row.delta_ahr_bpm)},
                    {"delta_hrv_bpm", number_or_null(row.delta_hrv_bpm)},
                    {"pearson", number_or_null(row.pearson)},
                    {"fom_ahr_weighted", row.fom_ahr_w},
                    {"fom_hrv_weighted", row.fom_hrv_w},
                    {"score", row.score},
                    {"ahr_frames_excluded", row.ahr_frames_excluded},
                    {"flags", row.flags}});
  }
  return {{"scenarios", rows}, {"total_score", r.total_scores()}, {"metadata", r.metadata}};
}

ScoreReport score_report_from_json(const nlohmann::json& j) {
  try {
    ScoreReport r;
    for (const auto& row : j.at("scenarios")) {
      ScoreRow s;
      s.scenario = row.at("scenario").get<std::string>();
      s.method = row.at("method").get<std::string>();
      s.delta_ahr_bpm = number_or_nan(row.at("delta_ahr_bpm"));
      s.delta_hrv_bpm = number_or_nan(row.at("delta_hrv_bpm"));
      s.pearson = number_or_nan(row.at("pearson"));
      s.fom_ahr_w = row.at("fom_ahr_weighted").get<double>();
      s.fom_hrv_w = row.at("fom_hrv_weighted").get<double>();
      s.score = row.at("score").get<double>();
      s.ahr_frames_excluded = row.value("ahr_frames_excluded", std::size_t{0});
      s.flags = row.value("flags", std::vector<std::string>{});
      r.rows.push_back(std::move(s));
    }
    r.metadata = j.value("metadata", nlohmann::json::object());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("score report: ") + e.what(), 0);
  }
}

std::string to_csv(const ScoreReport& r) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "scenario,delta_ahr_bpm,delta_hrv_bpm,pearson,fom_ahr_w,fom_hrv_w,score,flags,method\n";
  for (const auto& row : r.rows) {
    std::string flags;
    for (const auto& f : row.flags) flags += (flags.empty() ? "" : ";") + f;
    os << row.scenario << ',' << row.delta_ahr_bpm << ',' << row.delta_hrv_bpm << ',' << row.pearson << ','
       << row.fom_ahr_w << ',' << row.fom_hrv_w << ',' << row.score << ',' << flags << ',' << row.method << '\n';
  }
  return os.str();
}

void write_report(const ScoreReport& r, const std::string& json_path, const std::string& csv_path) {
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    if (!f) throw InvalidArgument("cannot write " + json_path);
    f << to_json(r).dump(2) << '\n';
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path);
    if (!f) throw InvalidArgument("cannot write " + csv_path);
    f << to_csv(r);
  }
}

}  // namespace radarppg::metrics
