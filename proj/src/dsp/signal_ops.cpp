// SPDX-License-Identifier: Apache-2.0
#include "radarppg/dsp/signal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "radarppg/errors.hpp"

namespace radarppg::dsp {

std::vector<double> max_filter(std::span<const double> x, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw InvalidArgument("max_filter: window must be odd");
  if (x.empty()) throw InvalidArgument("max_filter: empty input");
  const std::size_t n = x.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  // Monotone deque of candidate indices over [i - half, i + half].
  std::deque<std::size_t> dq;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t right = std::min(n - 1, i + half);
    for (; next <= right; ++next) {
      while (!dq.empty() && x[dq.back()] <= x[next]) dq.pop_back();
      dq.push_back(next);
    }
    const std::size_t left = i >= half ? i - half : 0;
    while (dq.front() < left) dq.pop_front();
    out[i] = x[dq.front()];
  }
  return out;
}

std::vector<double> interp_flagged(std::span<const double> x, const std::vector<bool>& flags) {
  if (flags.size() != x.size()) throw InvalidArgument("interp_flagged: flag length mismatch");
  std::vector<double> out(x.begin(), x.end());
  const std::size_t n = x.size();
  std::size_t prev = n;  // index of last reliable sample, n if none yet
  std::size_t i = 0;
  while (i < n) {
    if (!flags[i]) {
      prev = i++;
      continue;
    }
    std::size_t j = i;
    while (j < n && flags[j]) ++j;
    if (prev == n && j == n) throw InvalidArgument("interp_flagged: every sample is flagged");
    for (std::size_t k = i; k < j; ++k) {
      if (prev == n) {
        out[k] = x[j];
      } else if (j == n) {
        out[k] = x[prev];
      } else {
        const double a = static_cast<double>(k - prev) / static_cast<double>(j - prev);
        out[k] = x[prev] + a * (x[j] - x[prev]);
      }
    }
    i = j;
  }
  return out;
}

double soft_indicator(double x, double threshold, double scale) {
  return 1.0 / (1.0 + std::exp(-(x - threshold) / scale));
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("pearson: length mismatch");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void zscore_inplace(std::span<double> x) {
  const double m = mean(x);
  const double s = std::max(stddev(x), 1e-12);
  for (auto& v : x) v = (v - m) / s;
}

}  // namespace radarppg::dsp
