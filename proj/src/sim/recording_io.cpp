// SPDX-License-Identifier: Apache-2.0
#include "radarppg/sim/recording_io.hpp"

#include "radarppg/io/binary.hpp"

namespace radarppg::sim {

using nlohmann::json;

json radar_config_to_json(const RadarConfig& cfg) {
  return json{{"f_carrier", cfg.f_carrier}, {"bandwidth", cfg.bandwidth},
              {"chirp_duration", cfg.chirp_duration}, {"adc_rate", cfg.adc_rate},
              {"n_fast", cfg.n_fast}, {"prf", cfg.prf}, {"tx_power_dbm", cfg.tx_power_dbm}};
}

RadarConfig radar_config_from_json(const json& j, const RadarConfig& defaults) {
  RadarConfig c = defaults;
  c.f_carrier = j.value("f_carrier", c.f_carrier);
  c.bandwidth = j.value("bandwidth", c.bandwidth);
  c.chirp_duration = j.value("chirp_duration", c.chirp_duration);
  c.adc_rate = j.value("adc_rate", c.adc_rate);
  c.n_fast = j.value("n_fast", c.n_fast);
  c.prf = j.value("prf", c.prf);
  c.tx_power_dbm = j.value("tx_power_dbm", c.tx_power_dbm);
  return c;
}

std::uint64_t recording_file_size(std::uint64_t header_len, std::size_t k, std::size_t t) {
  return 8 + header_len + 8ull * k * t + 4ull * t;
}

void write_recording(const RecordingCube& cube, const std::string& path) {
  cube.validate();
  json header{{"version", 1},
              {"config", radar_config_to_json(cube.config)},
              {"K", cube.num_fast},
              {"T", cube.num_frames},
              {"scenario_label", cube.scenario_label},
              {"has_truth", cube.truth.has_value()}};
  if (cube.truth) {
    header["truth"] = {{"fs", cube.truth->fs},
                       {"samples", cube.truth->displacement_mm.size()},
                       {"beats", cube.truth->beat_times_s.size()}};
  }

  io::BinaryWriter w(path);
  w.write_header("RVR1", header);
  std::vector<float> interleaved;
  interleaved.reserve(2 * cube.iq.size());
  for (const auto& s : cube.iq) {
    interleaved.push_back(s.real());
    interleaved.push_back(s.imag());
  }
  w.write_f32(interleaved);
  w.write_f32(cube.ppg);
  if (cube.truth) {
    const auto& tr = *cube.truth;
    w.write_f32_from<double>(tr.displacement_mm);
    w.write_f32_from<double>(tr.ppg);
    w.write_f32_from<double>(tr.rbm_displacement_mm);
    w.write_f32_from<double>(tr.beat_times_s);
  }
  w.close();
}

RecordingCube read_recording(const std::string& path) {
  io::BinaryReader r(path);
  const json header = r.read_header("RVR1");

  RecordingCube cube;
  try {
    cube.config = radar_config_from_json(header.at("config"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad config block: ") + e.what(), 8);
  }
  cube.num_fast = io::header_field<std::size_t>(header, "K");
  cube.num_frames = io::header_field<std::size_t>(header, "T");
  cube.scenario_label = header.value("scenario_label", std::string{});
  if (cube.num_fast != cube.config.n_fast) {
    throw FormatError("dimension mismatch: K = " + std::to_string(cube.num_fast) +
                          " but config.n_fast = " + std::to_string(cube.config.n_fast),
                      8);
  }

  const auto flat = r.read_f32(2ull * cube.num_fast * cube.num_frames, "iq samples");
  cube.iq.resize(cube.num_fast * cube.num_frames);
  for (std::size_t i = 0; i < cube.iq.size(); ++i) cube.iq[i] = {flat[2 * i], flat[2 * i + 1]};
  cube.ppg = r.read_f32(cube.num_frames, "ppg");

  if (io::header_field<bool>(header, "has_truth")) {
    const auto& th = header.at("truth");
    const auto n = th.at("samples").get<std::size_t>();
    const auto beats = th.at("beats").get<std::size_t>();
    if (n != cube.num_frames) throw FormatError("dimension mismatch: truth length != T", 8);
    PhysioTruth tr;
    tr.fs = th.value("fs", cube.config.prf);
    auto to_d = [](const std::vector<float>& v) { return std::vector<double>(v.begin(), v.end()); };
    tr.displacement_mm = to_d(r.read_f32(n, "truth displacement"));
    tr.ppg = to_d(r.read_f32(n, "truth ppg"));
    tr.rbm_displacement_mm = to_d(r.read_f32(n, "truth rbm"));
    tr.beat_times_s = to_d(r.read_f32(beats, "truth beats"));
    cube.truth = std::move(tr);
  }
  r.expect_end();
  return cube;
}

}  // namespace radarppg::sim
