// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "radarppg/nn/tensor.hpp"

namespace radarppg::nn {

template <typename S>
struct AdamWState {
  double lr = 9.2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::uint64_t step = 0;
  std::vector<std::vector<S>> first_moment;
  std::vector<std::vector<S>> second_moment;
};

/// One AdamW update over `params` using their accumulated gradients.
/// Decay is decoupled: theta <- theta - lr * wd * theta before the
/// bias-corrected Adam step. Parameters without a gradient see only decay.
template <typename S>
void adamw_step(AdamWState<S>& state, std::vector<Tensor<S>>& params);

}  // namespace radarppg::nn
