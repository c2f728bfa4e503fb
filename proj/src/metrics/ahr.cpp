// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "radarppg/dsp/stft.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/metrics/metrics.hpp"

namespace radarppg::metrics {

AhrResult ahr_error(std::span<const double> est, std::span<const double> ref, double fs) {
  if (est.size() != ref.size()) throw InvalidArgument("ahr_error: signals differ in length");
  if (!(fs > 0.0)) throw InvalidArgument("ahr_error: fs must be positive");
  if (static_cast<double>(est.size()) < kAhrWindowS * fs)
    throw InvalidArgument("ahr_error: signals are shorter than one 10 s window");

  const dsp::StftParams params{kAhrWindowS, kAhrHopS, kAhrPadSize};
  const auto te = dsp::stft_peak_track(est, fs, params, kAhrBandHz);
  const auto tr = dsp::stft_peak_track(ref, fs, params, kAhrBandHz);

  AhrResult r;
  r.frames_total = te.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < te.size(); ++i) {
    if (te.flagged[i] || tr.flagged[i]) {
      ++r.frames_excluded;
      continue;
    }
    r.est_bpm.push_back(60.0 * te.freqs_hz[i]);
    r.ref_bpm.push_back(60.0 * tr.freqs_hz[i]);
    const double e = r.est_bpm.back() - r.ref_bpm.back();
    ss += e * e;
  }
  if (r.est_bpm.empty()) throw EvaluationError("ahr_error: every STFT frame is flagged");
  r.rmse_bpm = std::sqrt(ss / static_cast<double>(r.est_bpm.size()));
  return r;
}

double pooled_ahr_rmse(std::span<const AhrResult> parts) {
  double ss = 0.0;
  std::size_t n = 0;
  for (const auto& p : parts)
    for (std::size_t i = 0; i < p.est_bpm.size(); ++i) {
      const double e = p.est_bpm[i] - p.ref_bpm[i];
      ss += e * e;
      ++n;
    }
  if (n == 0) throw EvaluationError("pooled_ahr_rmse: no usable frames");
  return std::sqrt(ss / static_cast<double>(n));
}

}  // namespace radarppg::metrics
