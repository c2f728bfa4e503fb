// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "radarppg/nn/tensor.hpp"

namespace radarppg::nn {

/// Bidirectional scaled dot-product attention on d x T projections, split
/// into `heads` groups of d / heads rows, concatenated back to d x T.
/// When `weights_out` is given it receives the heads x T x T row-stochastic
/// attention weights (query-major).
template <typename S>
Tensor<S> scaled_dot_product_attention(const Tensor<S>& q, const Tensor<S>& k, const Tensor<S>& v,
                                       std::size_t heads, std::vector<S>* weights_out = nullptr);

template <typename S>
struct MhsaParams {
  Tensor<S> wq, bq, wk, bk, wv, bv, wo, bo;
};

/// Output projection of concatenated heads of attention over linear
/// projections of x.
template <typename S>
Tensor<S> multi_head_self_attention(const Tensor<S>& x, const MhsaParams<S>& p, std::size_t heads,
                                    std::vector<S>* weights_out = nullptr);

}  // namespace radarppg::nn
