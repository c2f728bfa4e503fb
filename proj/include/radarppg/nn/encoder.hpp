// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "radarppg/nn/attention.hpp"
#include "radarppg/nn/tensor.hpp"

namespace radarppg::nn {

template <typename S>
struct EncoderLayerParams {
  MhsaParams<S> attn;
  Tensor<S> ln1_gain, ln1_shift;
  Tensor<S> ff1_w, ff1_b;  // d_ff x d
  Tensor<S> ff2_w, ff2_b;  // d x d_ff
  Tensor<S> ln2_gain, ln2_shift;
};

/// Post-norm Transformer encoder layer:
///   y   = LN(x + Drop(MHSA(x)))
///   out = LN(y + Drop(W2 relu(W1 y + b1) + b2))
/// `rng` is only consulted when training with dropout_p > 0.
template <typename S>
Tensor<S> encoder_layer(const Tensor<S>& x, const EncoderLayerParams<S>& p, std::size_t heads, double dropout_p,
                        bool training, std::mt19937_64* rng);

}  // namespace radarppg::nn
