// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "radarppg/dsp/signal_ops.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/metrics/metrics.hpp"

namespace radarppg::metrics {

namespace {

// Piecewise-linear interpolation, holding the end values outside the knots.
double interp(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
  const auto lo = hi - 1;
  const double f = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + f * (ys[hi] - ys[lo]);
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> instantaneous_hr(std::span<const double> peaks_s) {
  std::vector<double> mid, bpm;
  for (std::size_t i = 1; i < peaks_s.size(); ++i) {
    const double rr = peaks_s[i] - peaks_s[i - 1];
    if (!(rr > 0.0)) throw InvalidArgument("instantaneous_hr: peak times must increase");
    mid.push_back(0.5 * (peaks_s[i] + peaks_s[i - 1]));
    bpm.push_back(60.0 / rr);
  }
  return {mid, bpm};
}

HrvResult hrv_error(std::span<const double> est, std::span<const double> ref, double fs) {
  if (est.size() != ref.size()) throw InvalidArgument("hrv_error: signals cover different spans");
  HrvResult r;
  r.est_peaks_s = detect_peaks(est, fs);
  r.ref_peaks_s = detect_peaks(ref, fs);
  if (r.est_peaks_s.size() < 2 || r.ref_peaks_s.size() < 2)
    throw EvaluationError("HRV undefined: " + std::to_string(r.est_peaks_s.size()) + " estimated and " +
                          std::to_string(r.ref_peaks_s.size()) + " reference peaks");

  const auto [te, he] = instantaneous_hr(r.est_peaks_s);
  const auto [tr, hr] = instantaneous_hr(r.ref_peaks_s);
  const double start = std::max(te.front(), tr.front());
  const double stop = std::min(te.back(), tr.back());
  if (start > stop) throw EvaluationError("HRV undefined: heart-rate series do not overlap in time");

  const double step = 1.0 / kHrGridHz;
  double ss = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double t = start + static_cast<double>(k) * step;
    if (t > stop + 1e-12) break;
    r.grid_s.push_back(t);
    r.est_hr_bpm.push_back(interp(te, he, t));
    r.ref_hr_bpm.push_back(interp(tr, hr, t));
    const double e = r.est_hr_bpm.back() - r.ref_hr_bpm.back();
    ss += e * e;
  }
  r.rmse_bpm = std::sqrt(ss / static_cast<double>(r.grid_s.size()));
  r.pearson = dsp::pearson(est, ref);
  return r;
}

double pooled_hrv_rmse(std::span<const HrvResult> parts) {
  double ss = 0.0;
  std::size_t n = 0;
  for (const auto& p : parts)
    for (std::size_t i = 0; i < p.grid_s.size(); ++i) {
      const double e = p.est_hr_bpm[i] - p.ref_hr_bpm[i];
      ss += e * e;
      ++n;
    }
  if (n == 0) throw EvaluationError("pooled_hrv_rmse: no grid points");
  return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace radarppg::metrics
