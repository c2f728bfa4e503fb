// SPDX-License-Identifier: Apache-2.0
#include "radarppg/dsp/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "radarppg/errors.hpp"

namespace radarppg::dsp {

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::span<Complex> data, bool inverse) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw InvalidArgument("fft: size must be a power of two");
  if (n == 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const double theta = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly instead of by recurrence to keep the
      // round-trip error near machine precision for large sizes.
      const Complex w = std::polar(1.0, theta * static_cast<double>(k));
      for (std::size_t start = 0; start < n; start += len) {
        const Complex u = data[start + k];
        const Complex v = data[start + k + half] * w;
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : data) v *= scale;
  }
}

std::vector<Complex> fft_c2c(std::span<const Complex> x, std::size_t size) {
  if (size < x.size()) throw InvalidArgument("fft_c2c: size smaller than input length");
  if (!is_power_of_two(size)) throw InvalidArgument("fft_c2c: size must be a power of two");
  std::vector<Complex> out(size, Complex{0.0, 0.0});
  std::copy(x.begin(), x.end(), out.begin());
  fft_inplace(out, false);
  return out;
}

std::vector<Complex> ifft_c2c(std::span<const Complex> spectrum) {
  std::vector<Complex> out(spectrum.begin(), spectrum.end());
  fft_inplace(out, true);
  return out;
}

}  // namespace radarppg::dsp
