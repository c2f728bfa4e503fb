// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "radarppg/nn/encoder.hpp"
#include "radarppg/nn/tensor.hpp"

namespace radarppg::model {

struct ModelConfig {
  std::size_t in_channels = 8;
  std::size_t d_model = 96;
  std::size_t heads = 8;
  std::size_t layers = 2;
  double dropout = 0.16;
  std::vector<std::size_t> stem_channels{32, 64, 96};
  std::size_t stem_kernel = 3;
  std::size_t d_ff = 384;
  double lr = 9.2e-4;
  std::size_t batch = 4;
  double weight_decay = 1.3e-5;
  std::size_t epochs = 40;
  std::uint64_t seed = 7;
  bool positional_encoding = true;

  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

/// Convolutional stem -> sinusoidal positional encoding -> post-norm
/// Transformer encoder -> 1x1 convolution head. Maps C x T to 1 x T.
template <typename S>
class PpgModel {
 public:
  explicit PpgModel(ModelConfig config);

  const ModelConfig& config() const noexcept { return config_; }

  /// `rng` drives dropout and is only used when training.
  nn::Tensor<S> forward(const nn::Tensor<S>& features, bool training = false, std::mt19937_64* rng = nullptr) const;
  std::vector<S> infer(std::span<const S> features, std::size_t frames) const;

  /// Stable order; names follow "stem.0.weight", "encoder.1.ff1.bias", ...
  const std::vector<std::pair<std::string, nn::Tensor<S>>>& named_parameters() const { return named_; }
  std::vector<nn::Tensor<S>> parameters() const;
  std::size_t parameter_count() const;
  void zero_grad();

  /// Copies values between models of the same configuration.
  std::vector<std::vector<S>> snapshot() const;
  void restore(const std::vector<std::vector<S>>& values);

 private:
  nn::Tensor<S> param(const std::string& name, nn::Shape shape);

  ModelConfig config_;
  std::vector<std::pair<nn::Tensor<S>, nn::Tensor<S>>> stem_;
  std::vector<nn::EncoderLayerParams<S>> encoder_;
  nn::Tensor<S> head_w_, head_b_;
  std::vector<std::pair<std::string, nn::Tensor<S>>> named_;
};

extern template class PpgModel<float>;
extern template class PpgModel<double>;

/// Fan-in scaled uniform weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero
/// biases, unit layer-norm gains and zero shifts.
template <typename S>
void initialize_parameters(PpgModel<S>& model, std::uint64_t seed);

}  // namespace radarppg::model
