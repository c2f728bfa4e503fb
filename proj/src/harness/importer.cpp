// SPDX-License-Identifier: Apache-2.0
#include "radarppg/harness/importer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "radarppg/errors.hpp"
#include "radarppg/sim/recording_io.hpp"

namespace radarppg::harness {

namespace {

nlohmann::json read_sidecar(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open sidecar " + path, 0);
  try {
    nlohmann::json j;
    f >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("sidecar " + path + " is not valid JSON: " + e.what(), 0);
  }
}

}  // namespace

sim::RecordingCube import_challenge_cube(const std::string& raw_path, const std::string& sidecar_path) {
  const auto side = read_sidecar(sidecar_path);
  sim::RecordingCube cube;
  try {
    cube.num_fast = side.at("K").get<std::size_t>();
    cube.num_frames = side.at("T").get<std::size_t>();
    cube.config = sim::radar_config_from_json(side.value("radar", nlohmann::json::object()));
    cube.config.prf = side.at("fs").get<double>();
    cube.config.f_carrier = side.at("carrier").get<double>();
    cube.config.n_fast = cube.num_fast;
    cube.scenario_label = side.value("scenario_label", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("sidecar " + sidecar_path + ": " + e.what(), 0);
  }

  const std::uint64_t k = cube.num_fast, t = cube.num_frames;
  const std::uint64_t expected = 8 * k * t + 4 * t;
  std::error_code ec;
  const auto actual = std::filesystem::file_size(raw_path, ec);
  if (ec) throw FormatError("cannot stat " + raw_path + ": " + ec.message(), 0);
  if (actual != expected)
    throw FormatError("raw cube " + raw_path + " has " + std::to_string(actual) + " bytes, sidecar K = " +
                          std::to_string(k) + ", T = " + std::to_string(t) + " implies " + std::to_string(expected),
                      std::min<std::uint64_t>(actual, expected));

  std::ifstream f(raw_path, std::ios::binary);
  if (!f) throw FormatError("cannot open " + raw_path, 0);
  std::vector<float> buf(2 * k * t);
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  cube.iq.resize(k * t);
  for (std::size_t i = 0; i < cube.iq.size(); ++i) cube.iq[i] = {buf[2 * i], buf[2 * i + 1]};
  cube.ppg.resize(t);
  f.read(reinterpret_cast<char*>(cube.ppg.data()), static_cast<std::streamsize>(t * sizeof(float)));
  if (!f) throw FormatError("short read from " + raw_path, static_cast<std::uint64_t>(f.gcount()));

  // Per-recording z-score, accumulated in double.
  double mean = 0.0, var = 0.0;
  for (float p : cube.ppg) mean += p;
  mean /= static_cast<double>(t);
  for (float p : cube.ppg) var += (p - mean) * (p - mean);
  const double sd = std::max(std::sqrt(var / static_cast<double>(t)), 1e-12);
  for (auto& p : cube.ppg) p = static_cast<float>((p - mean) / sd);

  try {
    cube.config.validate();
    cube.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("imported cube is invalid: ") + e.what(), 0);
  }
  return cube;
}

void export_challenge_cube(const sim::RecordingCube& cube, const std::string& raw_path,
                           const std::string& sidecar_path) {
  cube.validate();
  std::ofstream f(raw_path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + raw_path);
  std::vector<float> buf(2 * cube.iq.size());
  for (std::size_t i = 0; i < cube.iq.size(); ++i) {
    buf[2 * i] = cube.iq[i].real();
    buf[2 * i + 1] = cube.iq[i].imag();
  }
  f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
  f.write(reinterpret_cast<const char*>(cube.ppg.data()), static_cast<std::streamsize>(cube.ppg.size() * sizeof(float)));
  if (!f) throw InvalidArgument("write failed for " + raw_path);

  nlohmann::json side{{"K", cube.num_fast},
                      {"T", cube.num_frames},
                      {"fs", cube.config.prf},
                      {"carrier", cube.config.f_carrier},
                      {"radar", sim::radar_config_to_json(cube.config)},
                      {"scenario_label", cube.scenario_label}};
  std::ofstream s(sidecar_path);
  if (!s) throw InvalidArgument("cannot write " + sidecar_path);
  s << side.dump(2) << '\n';
}

}  // namespace radarppg::harness
