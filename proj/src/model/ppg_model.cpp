// SPDX-License-Identifier: Apache-2.0
#include "radarppg/model/ppg_model.hpp"

#include <cmath>

#include "radarppg/errors.hpp"
#include "radarppg/nn/ops.hpp"

namespace radarppg::model {

void ModelConfig::validate() const {
  if (in_channels == 0) throw InvalidArgument("model: in_channels must be positive");
  if (d_model == 0 || heads == 0 || d_model % heads != 0)
    throw InvalidArgument("model: d_model must be a positive multiple of heads");
  if (d_model % 2 != 0) throw InvalidArgument("model: d_model must be even for the positional encoding");
  if (stem_channels.empty() || stem_channels.back() != d_model)
    throw InvalidArgument("model: last stem channel count must equal d_model");
  for (auto c : stem_channels)
    if (c == 0) throw InvalidArgument("model: stem channel counts must be positive");
  if (stem_kernel == 0 || stem_kernel % 2 == 0) throw InvalidArgument("model: stem_kernel must be odd");
  if (d_ff == 0) throw InvalidArgument("model: d_ff must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InvalidArgument("model: dropout must lie in [0, 1)");
  if (!(lr > 0.0)) throw InvalidArgument("model: lr must be positive");
  if (batch == 0) throw InvalidArgument("model: batch must be positive");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("model: weight_decay must be non-negative");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"in_channels", c.in_channels}, {"d_model", c.d_model},   {"heads", c.heads},
          {"layers", c.layers},           {"dropout", c.dropout},   {"stem_channels", c.stem_channels},
          {"stem_kernel", c.stem_kernel}, {"d_ff", c.d_ff},         {"lr", c.lr},
          {"batch", c.batch},             {"weight_decay", c.weight_decay}, {"epochs", c.epochs},
          {"seed", c.seed},               {"positional_encoding", c.positional_encoding}};
}

ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig c) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    try {
      if (k == "in_channels") c.in_channels = v.get<std::size_t>();
      else if (k == "d_model") c.d_model = v.get<std::size_t>();
      else if (k == "heads") c.heads = v.get<std::size_t>();
      else if (k == "layers") c.layers = v.get<std::size_t>();
      else if (k == "dropout") c.dropout = v.get<double>();
      else if (k == "stem_channels") c.stem_channels = v.get<std::vector<std::size_t>>();
      else if (k == "stem_kernel") c.stem_kernel = v.get<std::size_t>();
      else if (k == "d_ff") c.d_ff = v.get<std::size_t>();
      else if (k == "lr") c.lr = v.get<double>();
      else if (k == "batch") c.batch = v.get<std::size_t>();
      else if (k == "weight_decay") c.weight_decay = v.get<double>();
      else if (k == "epochs") c.epochs = v.get<std::size_t>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "positional_encoding") c.positional_encoding = v.get<bool>();
      else throw ConfigError("model config: unknown key \"" + k + "\"");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("model config: bad value for \"" + k + "\": " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

template <typename S>
nn::Tensor<S> PpgModel<S>::param(const std::string& name, nn::Shape shape) {
  auto t = nn::Tensor<S>::zeros(std::move(shape), true);
  named_.emplace_back(name, t);
  return t;
}

template <typename S>
PpgModel<S>::PpgModel(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  const auto d = config_.d_model;
  std::size_t cin = config_.in_channels;
  for (std::size_t i = 0; i < config_.stem_channels.size(); ++i) {
    const auto cout = config_.stem_channels[i];
    const auto pre = "stem." + std::to_string(i);
    auto w = param(pre + ".weight", {cout, cin, config_.stem_kernel});
    auto b = param(pre + ".bias", {cout});
    stem_.emplace_back(w, b);
    cin = cout;
  }
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const auto pre = "encoder." + std::to_string(l);
    nn::EncoderLayerParams<S> p;
    p.attn.wq = param(pre + ".attn.wq", {d, d});
    p.attn.bq = param(pre + ".attn.bq", {d});
    p.attn.wk = param(pre + ".attn.wk", {d, d});
    p.attn.bk = param(pre + ".attn.bk", {d});
    p.attn.wv = param(pre + ".attn.wv", {d, d});
    p.attn.bv = param(pre + ".attn.bv", {d});
    p.attn.wo = param(pre + ".attn.wo", {d, d});
    p.attn.bo = param(pre + ".attn.bo", {d});
    p.ln1_gain = param(pre + ".ln1.gain", {d});
    p.ln1_shift = param(pre + ".ln1.shift", {d});
    p.ff1_w = param(pre + ".ff1.weight", {config_.d_ff, d});
    p.ff1_b = param(pre + ".ff1.bias", {config_.d_ff});
    p.ff2_w = param(pre + ".ff2.weight", {d, config_.d_ff});
    p.ff2_b = param(pre + ".ff2.bias", {d});
    p.ln2_gain = param(pre + ".ln2.gain", {d});
    p.ln2_shift = param(pre + ".ln2.shift", {d});
    encoder_.push_back(std::move(p));
  }
  head_w_ = param("head.weight", {1, d});
  head_b_ = param("head.bias", {1});
  initialize_parameters(*this, config_.seed);
}

template <typename S>
nn::Tensor<S> PpgModel<S>::forward(const nn::Tensor<S>& features, bool training, std::mt19937_64* rng) const {
  if (features.rank() != 2 || features.dim(0) != config_.in_channels)
    throw ShapeError("model: expected " + std::to_string(config_.in_channels) + " x T features, got " +
                     nn::shape_string(features.shape()));
  const auto t = features.dim(1);
  if (t == 0) throw ShapeError("model: empty input");

  auto h = features;
  for (const auto& [w, b] : stem_) h = nn::relu(nn::conv1d(h, w, b));
  if (config_.positional_encoding) {
    auto pe = nn::Tensor<S>::from({config_.d_model, t}, nn::sinusoidal_positional_encoding<S>(config_.d_model, t));
    h = nn::add(h, pe);
  }
  for (const auto& layer : encoder_) h = nn::encoder_layer(h, layer, config_.heads, config_.dropout, training, rng);
  auto y = nn::linear(h, head_w_, head_b_);
  return y;
}

template <typename S>
std::vector<S> PpgModel<S>::infer(std::span<const S> features, std::size_t frames) const {
  if (features.size() != config_.in_channels * frames)
    throw ShapeError("model: feature buffer does not hold " + std::to_string(config_.in_channels) + " x " +
                     std::to_string(frames) + " values");
  auto x = nn::Tensor<S>::from({config_.in_channels, frames}, std::vector<S>(features.begin(), features.end()));
  auto y = forward(x, false, nullptr);
  return std::vector<S>(y.values().begin(), y.values().end());
}

template <typename S>
std::vector<nn::Tensor<S>> PpgModel<S>::parameters() const {
  std::vector<nn::Tensor<S>> out;
  out.reserve(named_.size());
  for (const auto& [n, t] : named_) out.push_back(t);
  return out;
}

template <typename S>
std::size_t PpgModel<S>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named_) n += t.numel();
  return n;
}

template <typename S>
void PpgModel<S>::zero_grad() {
  for (auto& [n, t] : named_) t.zero_grad();
}

template <typename S>
std::vector<std::vector<S>> PpgModel<S>::snapshot() const {
  std::vector<std::vector<S>> out;
  out.reserve(named_.size());
  for (const auto& [n, t] : named_) out.emplace_back(t.values().begin(), t.values().end());
  return out;
}

template <typename S>
void PpgModel<S>::restore(const std::vector<std::vector<S>>& values) {
  if (values.size() != named_.size()) throw ShapeError("model: snapshot has the wrong number of tensors");
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto dst = named_[i].second.mutable_values();
    if (dst.size() != values[i].size()) throw ShapeError("model: snapshot tensor " + named_[i].first + " has wrong size");
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

template <typename S>
void initialize_parameters(PpgModel<S>& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (const auto& [name, t0] : model.named_parameters()) {
    auto t = t0;
    auto v = t.mutable_values();
    const bool is_gain = name.ends_with(".gain");
    const bool is_weight = name.ends_with(".weight") || name.find(".attn.w") != std::string::npos;
    if (is_gain) {
      std::fill(v.begin(), v.end(), S{1});
    } else if (is_weight) {
      std::size_t fan_in = 1;
      for (std::size_t i = 1; i < t.rank(); ++i) fan_in *= t.dim(i);
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (auto& x : v) x = static_cast<S>(u(rng));
    } else {
      std::fill(v.begin(), v.end(), S{0});
    }
  }
}

template class PpgModel<float>;
template class PpgModel<double>;
template void initialize_parameters(PpgModel<float>&, std::uint64_t);
template void initialize_parameters(PpgModel<double>&, std::uint64_t);

}  // namespace radarppg::model
