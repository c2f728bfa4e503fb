// SPDX-License-Identifier: Apache-2.0
#include "radarppg/harness/split.hpp"

#include <cmath>
#include <string>

#include "radarppg/errors.hpp"

namespace radarppg::harness {

SplitRanges split_recording(std::size_t frames, const std::array<double, 3>& f, std::size_t min_frames) {
  double sum = 0.0;
  for (double x : f) {
    if (!(x > 0.0)) throw ConfigError("split: fractions must be positive");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split: fractions must sum to 1");

  // The small slack keeps products such as 0.85 * 60000 from landing one
  // frame short because of binary rounding.
  const auto snap = [frames](double frac) {
    const auto b = static_cast<std::size_t>(std::floor(frac * static_cast<double>(frames) + 1e-6));
    return std::min(b, frames);
  };
  const auto b1 = snap(f[0]);
  const auto b2 = std::max(b1, snap(f[0] + f[1]));
  SplitRanges r{{0, b1}, {b1, b2}, {b2, frames}};

  const auto check = [min_frames](const FrameRange& p, const char* name) {
    if (p.second - p.first < min_frames)
      throw ConfigError(std::string("split: ") + name + " partition has " + std::to_string(p.second - p.first) +
                        " frames, one window needs " + std::to_string(min_frames));
  };
  check(r.train, "train");
  check(r.val, "validation");
  check(r.test, "test");
  return r;
}

}  // namespace radarppg::harness
