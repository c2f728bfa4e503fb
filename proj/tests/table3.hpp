// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

namespace radarppg::testing {

// Published per-scenario weighted FoM pairs, printed scores and totals of the
// challenge comparison (stationary, deep breathing, body movement).
struct PublishedRow {
  const char* method;
  std::array<double, 3> fom_ahr;
  std::array<double, 3> fom_hrv;
  std::array<double, 3> score;
  double total;
};

inline constexpr std::array<PublishedRow, 4> kPublishedScores{{
    {"Filtering", {13.2, 3.5, 2.6}, {4.0, 0.8, 0.0}, {17.2, 4.3, 2.6}, 8.0},
    {"Blind Source Separation", {13.2, 3.7, 3.0}, {1.8, 1.1, 0.0}, {15.0, 4.8, 3.0}, 7.6},
    {"HF-Heartbeat", {255.4, 115.7, 3.4}, {106.6, 12.5, 0.4}, {362.1, 128.1, 3.8}, 164.7},
    {"Our Method", {266.2, 227.6, 171.7}, {52.0, 65.7, 23.9}, {318.2, 293.2, 195.6}, 269.0},
}};

}  // namespace radarppg::testing
