// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "radarppg/nn/tensor.hpp"

namespace radarppg::nn {

// Activations are channels x time (d x T), row-major.

template <typename S>
Tensor<S> add(const Tensor<S>& a, const Tensor<S>& b);

template <typename S>
Tensor<S> relu(const Tensor<S>& x);

/// Inverted dropout: survivors are scaled by 1 / (1 - p). Identity when
/// training is false or p == 0.
template <typename S>
Tensor<S> dropout(const Tensor<S>& x, double p, std::mt19937_64& rng, bool training);

/// Zero-padded "same" cross-correlation. x: C_in x T, w: C_out x C_in x k
/// (k odd), b: C_out.
template <typename S>
Tensor<S> conv1d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b);

/// w: d_out x d_in, b: d_out. Applied independently at every time step.
template <typename S>
Tensor<S> linear(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b);

/// Normalizes every column (time step) over the d rows.
template <typename S>
Tensor<S> layer_norm(const Tensor<S>& x, const Tensor<S>& gain, const Tensor<S>& shift, double eps = 1e-5);

/// Mean squared error against a constant target; returns a scalar.
template <typename S>
Tensor<S> mse_loss(const Tensor<S>& pred, std::span<const S> target);

/// pe[2i, t] = sin(t / 10000^(2i/d)), pe[2i+1, t] = cos(same). d must be even.
template <typename S>
std::vector<S> sinusoidal_positional_encoding(std::size_t d, std::size_t t);

}  // namespace radarppg::nn
