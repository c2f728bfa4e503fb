// SPDX-License-Identifier: Apache-2.0
#include "radarppg/pipeline/feature_io.hpp"

#include "radarppg/io/binary.hpp"

namespace radarppg::pipeline {

void write_features(const FeatureFile& file, const std::string& path) {
  const auto& ft = file.features;
  if (ft.channels.size() != kFeatureChannels * ft.frames || file.ppg.size() != ft.frames) {
    throw ShapeError("write_features: inconsistent feature/PPG dimensions");
  }
  nlohmann::json header{{"version", 1},
                        {"C", kFeatureChannels},
                        {"T", ft.frames},
                        {"fs", ft.fs},
                        {"cpi_start_index", ft.cpi_start_index},
                        {"scenario_label", file.scenario_label},
                        {"recording_id", file.recording_id}};
  io::BinaryWriter w(path);
  w.write_header("RVF1", header);
  w.write_f32_from<double>(ft.channels);
  w.write_f32_from<double>(file.ppg);
  w.close();
}

FeatureFile read_features(const std::string& path) {
  io::BinaryReader r(path);
  const auto header = r.read_header("RVF1");
  const auto c = io::header_field<std::size_t>(header, "C");
  if (c != kFeatureChannels) {
    throw FormatError("dimension mismatch: expected 8 feature channels, header says " + std::to_string(c), 8);
  }
  FeatureFile f;
  f.features.frames = io::header_field<std::size_t>(header, "T");
  f.features.fs = io::header_field<double>(header, "fs");
  f.features.cpi_start_index = header.value("cpi_start_index", std::size_t{0});
  f.scenario_label = header.value("scenario_label", std::string{});
  f.recording_id = header.value("recording_id", std::string{});
  const auto ch = r.read_f32(c * f.features.frames, "channels");
  f.features.channels.assign(ch.begin(), ch.end());
  const auto ppg = r.read_f32(f.features.frames, "ppg");
  f.ppg.assign(ppg.begin(), ppg.end());
  r.expect_end();
  return f;
}

}  // namespace radarppg::pipeline
