// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace radarppg::dsp {

enum class FilterKind { BandPass, HighPass };

struct Band {
  double low_hz = 0.0;
  std::optional<double> high_hz;  // empty for high-pass
};

/// Linear-phase (type I) FIR filter. Instances only come out of design_fir,
/// which checks odd length, tap symmetry and band-pass DC rejection.
class FirFilter {
 public:
  const std::vector<double>& taps() const noexcept { return taps_; }
  std::size_t num_taps() const noexcept { return taps_.size(); }
  FilterKind kind() const noexcept { return kind_; }
  const Band& band() const noexcept { return band_; }
  double sample_rate() const noexcept { return sample_rate_; }

  /// |H(f)| of the filter at frequency f in Hz.
  double magnitude_at(double freq_hz) const;

 private:
  friend FirFilter design_fir(FilterKind, Band, double, std::size_t);
  FirFilter(std::vector<double> taps, FilterKind kind, Band band, double fs);

  std::vector<double> taps_;
  FilterKind kind_;
  Band band_;
  double sample_rate_;
};

/// Hamming-windowed sinc design. Band-pass filters are unity gain at the band
/// center; high-pass filters are unity gain at Nyquist.
FirFilter design_fir(FilterKind kind, Band band, double sample_rate, std::size_t num_taps);

/// Forward-backward filtering with odd-symmetric edge extension of
/// num_taps - 1 samples per side (shortened for inputs that are too short).
/// Net phase is zero and the magnitude response is |H|^2.
std::vector<double> filtfilt_odd_pad(const FirFilter& filter, std::span<const double> x);

}  // namespace radarppg::dsp
