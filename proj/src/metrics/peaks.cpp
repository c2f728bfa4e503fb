// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>

#include "radarppg/dsp/signal_ops.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/metrics/metrics.hpp"

namespace radarppg::metrics {

namespace {

// Local maxima, with flat tops reported at their middle sample (edges excluded).
std::vector<std::size_t> local_maxima(std::span<const double> x) {
  std::vector<std::size_t> out;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i - 1] < x[i]) {
      std::size_t ahead = i + 1;
      while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
      if (x[ahead] < x[i]) {
        out.push_back((i + ahead - 1) / 2);
        i = ahead;
        continue;
      }
    }
    ++i;
  }
  return out;
}

}  // namespace

double peak_prominence(std::span<const double> x, std::size_t peak) {
  if (peak >= x.size()) throw InvalidArgument("peak_prominence: index out of range");
  const double h = x[peak];
  double left_min = h;
  for (std::size_t i = peak; i-- > 0;) {
    if (x[i] > h) break;
    left_min = std::min(left_min, x[i]);
  }
  double right_min = h;
  for (std::size_t i = peak + 1; i < x.size(); ++i) {
    if (x[i] > h) break;
    right_min = std::min(right_min, x[i]);
  }
  return h - std::max(left_min, right_min);
}

std::vector<std::size_t> detect_peak_indices(std::span<const double> x, double fs) {
  if (!(fs > 0.0)) throw InvalidArgument("detect_peaks: fs must be positive");
  if (x.size() < 3) return {};
  const double threshold = dsp::stddev(x);
  const auto min_gap = static_cast<std::size_t>(std::ceil(kMinPeakDistanceS * fs - 1e-9));

  struct Candidate {
    std::size_t index;
    double prominence;
  };
  std::vector<Candidate> cands;
  for (auto p : local_maxima(x)) {
    const double prom = peak_prominence(x, p);
    if (prom >= threshold && prom > 0.0) cands.push_back({p, prom});
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.prominence > b.prominence; });

  std::vector<std::size_t> kept;  // sorted
  for (const auto& c : cands) {
    const auto pos = std::lower_bound(kept.begin(), kept.end(), c.index);
    const bool left_ok = pos == kept.begin() || c.index - *(pos - 1) >= min_gap;
    const bool right_ok = pos == kept.end() || *pos - c.index >= min_gap;
    if (left_ok && right_ok) kept.insert(pos, c.index);
  }
  return kept;
}

std::vector<double> detect_peaks(std::span<const double> x, double fs) {
  const auto idx = detect_peak_indices(x, fs);
  std::vector<double> t(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) t[i] = static_cast<double>(idx[i]) / fs;
  return t;
}

}  // namespace radarppg::metrics
