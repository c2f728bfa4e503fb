// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <utility>

namespace radarppg::harness {

using FrameRange = std::pair<std::size_t, std::size_t>;  // [first, second)

struct SplitRanges {
  FrameRange train, val, test;
};

/// Contiguous chronological partition of [0, frames): boundaries at
/// floor(f0 * T) and floor((f0 + f1) * T). Throws ConfigError when the
/// fractions are invalid or any partition is shorter than min_frames.
SplitRanges split_recording(std::size_t frames, const std::array<double, 3>& fractions, std::size_t min_frames);

}  // namespace radarppg::harness
