// SPDX-License-Identifier: Apache-2.0
#include "radarppg/nn/adamw.hpp"

#include <cmath>

#include "radarppg/errors.hpp"

namespace radarppg::nn {

template <typename S>
void adamw_step(AdamWState<S>& st, std::vector<Tensor<S>>& params) {
  if (st.first_moment.empty()) {
    for (const auto& p : params) {
      st.first_moment.emplace_back(p.numel(), S{0});
      st.second_moment.emplace_back(p.numel(), S{0});
    }
  }
  if (st.first_moment.size() != params.size()) throw ShapeError("adamw_step: parameter list changed size");

  ++st.step;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  const S decay = static_cast<S>(1.0 - st.lr * st.weight_decay);
  const S b1 = static_cast<S>(st.beta1), b2 = static_cast<S>(st.beta2);
  const S step_size = static_cast<S>(st.lr / bc1);
  const S inv_sqrt_bc2 = static_cast<S>(1.0 / std::sqrt(bc2));
  const S eps = static_cast<S>(st.eps);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i].mutable_values();
    auto& m = st.first_moment[i];
    auto& v = st.second_moment[i];
    if (m.size() != theta.size()) throw ShapeError("adamw_step: moment shape does not match parameter");
    const auto g = params[i].grad();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      theta[j] *= decay;
      const S gj = g.empty() ? S{0} : g[j];
      m[j] = b1 * m[j] + (S{1} - b1) * gj;
      v[j] = b2 * v[j] + (S{1} - b2) * gj * gj;
      theta[j] -= step_size * m[j] / (std::sqrt(v[j]) * inv_sqrt_bc2 + eps);
    }
  }
}

template void adamw_step(AdamWState<float>&, std::vector<Tensor<float>>&);
template void adamw_step(AdamWState<double>&, std::vector<Tensor<double>>&);

}  // namespace radarppg::nn
