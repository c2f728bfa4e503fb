// SPDX-License-Identifier: Apache-2.0
#include "radarppg/nn/encoder.hpp"

#include "radarppg/errors.hpp"
#include "radarppg/nn/ops.hpp"

namespace radarppg::nn {

template <typename S>
Tensor<S> encoder_layer(const Tensor<S>& x, const EncoderLayerParams<S>& p, std::size_t heads, double dropout_p,
                        bool training, std::mt19937_64* rng) {
  const bool drop = training && dropout_p > 0.0;
  if (drop && rng == nullptr) throw InvalidArgument("encoder_layer: training with dropout needs an RNG");
  std::mt19937_64 unused;
  std::mt19937_64& r = drop ? *rng : unused;

  const auto attn = dropout(multi_head_self_attention(x, p.attn, heads), dropout_p, r, drop);
  const auto y = layer_norm(add(x, attn), p.ln1_gain, p.ln1_shift);
  const auto hidden = relu(linear(y, p.ff1_w, p.ff1_b));
  const auto ff = dropout(linear(hidden, p.ff2_w, p.ff2_b), dropout_p, r, drop);
  return layer_norm(add(y, ff), p.ln2_gain, p.ln2_shift);
}

template Tensor<float> encoder_layer(const Tensor<float>&, const EncoderLayerParams<float>&, std::size_t, double,
                                     bool, std::mt19937_64*);
template Tensor<double> encoder_layer(const Tensor<double>&, const EncoderLayerParams<double>&, std::size_t, double,
                                      bool, std::mt19937_64*);

}  // namespace radarppg::nn
