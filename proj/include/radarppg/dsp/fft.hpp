// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace radarppg::dsp {

using Complex = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

std::size_t next_power_of_two(std::size_t n) noexcept;

/// In-place iterative radix-2 transform. `data.size()` must be a power of two.
/// The forward transform is unnormalized; the inverse divides by N.
void fft_inplace(std::span<Complex> data, bool inverse = false);

/// Forward DFT of `x` zero-padded to `size` (a power of two >= x.size()).
std::vector<Complex> fft_c2c(std::span<const Complex> x, std::size_t size);

/// Inverse of fft_c2c for a full-length spectrum.
std::vector<Complex> ifft_c2c(std::span<const Complex> spectrum);

}  // namespace radarppg::dsp
