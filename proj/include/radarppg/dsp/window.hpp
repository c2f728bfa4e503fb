// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace radarppg::dsp {

// Symmetric windows. n == 1 yields {1.0}; n == 0 throws InvalidArgument.
std::vector<double> hamming_window(std::size_t n);
std::vector<double> hann_window(std::size_t n);

}  // namespace radarppg::dsp
