// SPDX-License-Identifier: Apache-2.0
#include "radarppg/dsp/window.hpp"

#include <cmath>
#include <numbers>

#include "radarppg/errors.hpp"

namespace radarppg::dsp {

namespace {

std::vector<double> cosine_window(std::size_t n, double a0, const char* name) {
  if (n == 0) throw InvalidArgument(std::string(name) + ": window length must be >= 1");
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  const double denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = a0 - (1.0 - a0) * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom);
  }
  // Exact symmetry regardless of cos rounding.
  for (std::size_t k = 0; k < n / 2; ++k) w[n - 1 - k] = w[k];
  return w;
}

}  // namespace

std::vector<double> hamming_window(std::size_t n) { return cosine_window(n, 0.54, "hamming_window"); }

std::vector<double> hann_window(std::size_t n) { return cosine_window(n, 0.5, "hann_window"); }

}  // namespace radarppg::dsp
