// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "radarppg/sim/radar_sim.hpp"

namespace radarppg::sim {

// RVR1 layout: "RVR1" | u32 H | JSON header (H bytes) | K*T interleaved
// float32 I/Q (fast time fastest) | T float32 PPG | optional truth block of
// float32 arrays: displacement[T], ppg[T], rbm[T], beat_times[N].

void write_recording(const RecordingCube& cube, const std::string& path);
RecordingCube read_recording(const std::string& path);

/// Expected file size for a cube without truth and a header of header_len bytes.
std::uint64_t recording_file_size(std::uint64_t header_len, std::size_t k, std::size_t t);

nlohmann::json radar_config_to_json(const RadarConfig& cfg);
RadarConfig radar_config_from_json(const nlohmann::json& j, const RadarConfig& defaults = {});

}  // namespace radarppg::sim
