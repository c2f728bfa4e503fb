// SPDX-License-Identifier: Apache-2.0
#include "radarppg/dsp/fir.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "radarppg/dsp/window.hpp"
#include "radarppg/errors.hpp"

namespace radarppg::dsp {

namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Hamming-windowed ideal low-pass normalized to unit DC gain.
std::vector<double> windowed_lowpass(double cutoff_hz, double fs, std::size_t n) {
  const auto w = hamming_window(n);
  const double fc = cutoff_hz / fs;
  const double mid = static_cast<double>(n - 1) / 2.0;
  std::vector<double> h(n);
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    h[k] = 2.0 * fc * sinc(2.0 * fc * (static_cast<double>(k) - mid)) * w[k];
    sum += h[k];
  }
  for (auto& v : h) v /= sum;
  return h;
}

double response(const std::vector<double>& taps, double freq_hz, double fs) {
  // Evaluate about the center tap; the linear-phase term drops out of |H|.
  const double mid = static_cast<double>(taps.size() - 1) / 2.0;
  const double omega = 2.0 * std::numbers::pi * freq_hz / fs;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < taps.size(); ++k) {
    acc += taps[k] * std::polar(1.0, -omega * (static_cast<double>(k) - mid));
  }
  return std::abs(acc);
}

}  // namespace

FirFilter::FirFilter(std::vector<double> taps, FilterKind kind, Band band, double fs)
    : taps_(std::move(taps)), kind_(kind), band_(band), sample_rate_(fs) {
  const std::size_t n = taps_.size();
  if (n % 2 == 0) throw InvalidArgument("FirFilter: tap count must be odd");
  double peak = 0.0;
  for (double v : taps_) peak = std::max(peak, std::abs(v));
  for (std::size_t k = 0; k < n / 2; ++k) {
    if (std::abs(taps_[k] - taps_[n - 1 - k]) > 1e-12 * peak) {
      throw InvalidArgument("FirFilter: taps are not symmetric");
    }
  }
  if (kind_ == FilterKind::BandPass) {
    const double center = 0.5 * (band_.low_hz + *band_.high_hz);
    if (magnitude_at(0.0) >= 0.01 * magnitude_at(center)) {
      throw InvalidArgument("FirFilter: band-pass DC rejection below 40 dB; use more taps");
    }
  }
}

double FirFilter::magnitude_at(double freq_hz) const { return response(taps_, freq_hz, sample_rate_); }

FirFilter design_fir(FilterKind kind, Band band, double sample_rate, std::size_t num_taps) {
  if (num_taps == 0 || num_taps % 2 == 0) {
    throw InvalidArgument("design_fir: num_taps must be odd, got " + std::to_string(num_taps));
  }
  if (!(sample_rate > 0.0)) throw InvalidArgument("design_fir: sample rate must be positive");
  const double nyquist = sample_rate / 2.0;

  std::vector<double> taps;
  if (kind == FilterKind::BandPass) {
    if (!band.high_hz) throw InvalidArgument("design_fir: band-pass needs an upper edge");
    const double lo = band.low_hz;
    const double hi = *band.high_hz;
    if (!(lo > 0.0 && lo < hi && hi < nyquist)) {
      throw InvalidArgument("design_fir: band-pass requires 0 < low < high < fs/2");
    }
    const auto lp_hi = windowed_lowpass(hi, sample_rate, num_taps);
    const auto lp_lo = windowed_lowpass(lo, sample_rate, num_taps);
    taps.resize(num_taps);
    for (std::size_t k = 0; k < num_taps; ++k) taps[k] = lp_hi[k] - lp_lo[k];
    const double g = response(taps, 0.5 * (lo + hi), sample_rate);
    for (auto& v : taps) v /= g;
  } else {
    const double fc = band.low_hz;
    if (!(fc > 0.0 && fc < nyquist)) {
      throw InvalidArgument("design_fir: high-pass requires 0 < cutoff < fs/2");
    }
    band.high_hz.reset();
    taps = windowed_lowpass(fc, sample_rate, num_taps);
    for (auto& v : taps) v = -v;
    taps[num_taps / 2] += 1.0;
    const double g = response(taps, nyquist, sample_rate);
    for (auto& v : taps) v /= g;
  }
  return FirFilter(std::move(taps), kind, band, sample_rate);
}

namespace {

// Causal FIR pass. Samples before the start are taken equal to x[0], which
// matches steady-state initial conditions for a constant prefix.
std::vector<double> causal_pass(const std::vector<double>& h, const std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t m = h.size();
  std::vector<double> y(n, 0.0);
  const double x0 = x.front();
  std::vector<double> tail_sum(m + 1, 0.0);  // tail_sum[j] = sum_{k>=j} h[k]
  for (std::size_t k = m; k-- > 0;) tail_sum[k] = tail_sum[k + 1] + h[k];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t kmax = std::min(m - 1, i);
    double acc = 0.0;
    const double* xp = x.data() + i;
    for (std::size_t k = 0; k <= kmax; ++k) acc += h[k] * xp[-static_cast<std::ptrdiff_t>(k)];
    if (kmax + 1 < m) acc += tail_sum[kmax + 1] * x0;
    y[i] = acc;
  }
  return y;
}

}  // namespace

std::vector<double> filtfilt_odd_pad(const FirFilter& filter, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw InvalidArgument("filtfilt_odd_pad: empty input");
  const std::size_t pad = std::min(filter.num_taps() - 1, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  auto fwd = causal_pass(filter.taps(), ext);
  std::reverse(fwd.begin(), fwd.end());
  auto bwd = causal_pass(filter.taps(), fwd);
  std::reverse(bwd.begin(), bwd.end());
  return {bwd.begin() + static_cast<std::ptrdiff_t>(pad),
          bwd.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace radarppg::dsp
