// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "radarppg/sim/radar_sim.hpp"

namespace radarppg::harness {

// Raw cube layout: K*T complex float32 (real, imag interleaved; frame-major,
// fast-time index fastest) followed by T float32 PPG samples. The JSON
// sidecar carries {K, T, fs, carrier} and optionally the remaining radar
// fields and a scenario_label.

/// Loads a raw cube; the PPG is z-scored on load. Throws FormatError when
/// the file size disagrees with the sidecar.
sim::RecordingCube import_challenge_cube(const std::string& raw_path, const std::string& sidecar_path);

void export_challenge_cube(const sim::RecordingCube& cube, const std::string& raw_path,
                           const std::string& sidecar_path);

}  // namespace radarppg::harness
