// SPDX-License-Identifier: Apache-2.0
#include "radarppg/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "eigen_maps.hpp"
#include "radarppg/errors.hpp"

namespace radarppg::nn {

using detail::cmat;
using detail::mat;

namespace {

template <typename S>
void require_rank2(const Tensor<S>& t, const char* op) {
  if (t.rank() != 2) throw ShapeError(std::string(op) + ": expected a d x T tensor, got " + shape_string(t.shape()));
}

}  // namespace

template <typename S>
Tensor<S> add(const Tensor<S>& a, const Tensor<S>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add: shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
  std::vector<S> out(a.values().begin(), a.values().end());
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  auto an = a.node_ptr();
  auto bn = b.node_ptr();
  return Tensor<S>::make_result(a.shape(), std::move(out), {an, bn}, [an, bn](Node<S>& self) {
    for (auto* p : {an.get(), bn.get()}) {
      if (!p->requires_grad) continue;
      auto& g = p->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename S>
Tensor<S> relu(const Tensor<S>& x) {
  std::vector<S> out(x.values().begin(), x.values().end());
  for (auto& v : out) v = v > S{0} ? v : S{0};
  auto xn = x.node_ptr();
  return Tensor<S>::make_result(x.shape(), std::move(out), {xn}, [xn](Node<S>& self) {
    auto& g = xn->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (xn->value[i] > S{0}) g[i] += self.grad[i];
    }
  });
}

template <typename S>
Tensor<S> dropout(const Tensor<S>& x, double p, std::mt19937_64& rng, bool training) {
  if (p < 0.0 || p >= 1.0) throw InvalidArgument("dropout: p must lie in [0, 1)");
  if (!training || p == 0.0) return x;
  const S scale = static_cast<S>(1.0 / (1.0 - p));
  std::vector<S> mask(x.numel());
  for (auto& m : mask) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    m = u < p ? S{0} : scale;
  }
  std::vector<S> out(x.values().begin(), x.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  auto xn = x.node_ptr();
  return Tensor<S>::make_result(x.shape(), std::move(out), {xn}, [xn, mask = std::move(mask)](Node<S>& self) {
    auto& g = xn->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
  });
}

template <typename S>
Tensor<S> conv1d(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b) {
  require_rank2(x, "conv1d");
  if (w.rank() != 3) throw ShapeError("conv1d: weights must be C_out x C_in x k");
  const std::size_t cin = x.dim(0), t = x.dim(1);
  const std::size_t cout = w.dim(0), k = w.dim(2);
  if (w.dim(1) != cin) {
    throw ShapeError("conv1d: input has " + std::to_string(cin) + " channels, weights expect " +
                     std::to_string(w.dim(1)));
  }
  if (k % 2 == 0) throw ShapeError("conv1d: kernel size must be odd");
  if (b.numel() != cout) throw ShapeError("conv1d: bias length != C_out");
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  const auto T = static_cast<Eigen::Index>(t);

  // Per-tap weight matrices (C_out x C_in).
  std::vector<detail::RowMat<S>> taps(k, detail::RowMat<S>(cout, cin));
  const auto wv = w.values();
  for (std::size_t o = 0; o < cout; ++o)
    for (std::size_t c = 0; c < cin; ++c)
      for (std::size_t j = 0; j < k; ++j) taps[j](o, c) = wv[(o * cin + c) * k + j];

  // Output column range/input offset for tap j: y[:, t] += W_j x[:, t + j - pad].
  auto span_for = [pad, T](std::size_t j, Eigen::Index& y0, Eigen::Index& x0, Eigen::Index& len) {
    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
    y0 = std::max<std::ptrdiff_t>(0, -shift);
    const std::ptrdiff_t y1 = std::min<std::ptrdiff_t>(T, T - shift);
    x0 = y0 + shift;
    len = std::max<std::ptrdiff_t>(0, y1 - y0);
  };

  std::vector<S> out(cout * t);
  auto Y = mat(out, cout, T);
  const auto X = cmat(x.node()->value, cin, T);
  const auto bias = detail::ConstVecMap<S>(b.values().data(), cout);
  Y.colwise() = bias;
  for (std::size_t j = 0; j < k; ++j) {
    Eigen::Index y0, x0, len;
    span_for(j, y0, x0, len);
    if (len > 0) Y.middleCols(y0, len).noalias() += taps[j] * X.middleCols(x0, len);
  }

  auto xn = x.node_ptr(), wn = w.node_ptr(), bn = b.node_ptr();
  return Tensor<S>::make_result(
      {cout, t}, std::move(out), {xn, wn, bn},
      [xn, wn, bn, taps = std::move(taps), span_for, cin, cout, k, T](Node<S>& self) {
        const auto dY = cmat(self.grad, cout, T);
        if (bn->requires_grad) {
          auto& gb = bn->ensure_grad();
          detail::add_row_sums(gb.data(), dY);
        }
        const auto X = cmat(xn->value, cin, T);
        if (wn->requires_grad) {
          auto& gw = wn->ensure_grad();
          for (std::size_t j = 0; j < k; ++j) {
            Eigen::Index y0, x0, len;
            span_for(j, y0, x0, len);
            if (len <= 0) continue;
            const detail::RowMat<S> gtap = dY.middleCols(y0, len) * X.middleCols(x0, len).transpose();
            for (std::size_t o = 0; o < cout; ++o)
              for (std::size_t c = 0; c < cin; ++c) gw[(o * cin + c) * k + j] += gtap(o, c);
          }
        }
        if (xn->requires_grad) {
          auto dX = mat(xn->ensure_grad(), cin, T);
          for (std::size_t j = 0; j < k; ++j) {
            Eigen::Index y0, x0, len;
            span_for(j, y0, x0, len);
            if (len > 0) dX.middleCols(x0, len).noalias() += taps[j].transpose() * dY.middleCols(y0, len);
          }
        }
      });
}

template <typename S>
Tensor<S> linear(const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b) {
  require_rank2(x, "linear");
  require_rank2(w, "linear weights");
  const auto din = static_cast<Eigen::Index>(x.dim(0));
  const auto T = static_cast<Eigen::Index>(x.dim(1));
  const auto dout = static_cast<Eigen::Index>(w.dim(0));
  if (static_cast<Eigen::Index>(w.dim(1)) != din) {
    throw ShapeError("linear: input dim " + std::to_string(din) + " vs weights " + shape_string(w.shape()));
  }
  if (static_cast<Eigen::Index>(b.numel()) != dout) throw ShapeError("linear: bias length != d_out");

  std::vector<S> out(static_cast<std::size_t>(dout * T));
  auto Y = mat(out, dout, T);
  Y.colwise() = detail::ConstVecMap<S>(b.values().data(), dout);
  Y.noalias() += cmat(w.node()->value, dout, din) * cmat(x.node()->value, din, T);

  auto xn = x.node_ptr(), wn = w.node_ptr(), bn = b.node_ptr();
  return Tensor<S>::make_result({static_cast<std::size_t>(dout), x.dim(1)}, std::move(out), {xn, wn, bn},
                                [xn, wn, bn, din, dout, T](Node<S>& self) {
                                  const auto dY = cmat(self.grad, dout, T);
                                  if (bn->requires_grad) {
                                    detail::add_row_sums(bn->ensure_grad().data(), dY);
                                  }
                                  if (wn->requires_grad) {
                                    mat(wn->ensure_grad(), dout, din).noalias() +=
                                        dY * cmat(xn->value, din, T).transpose();
                                  }
                                  if (xn->requires_grad) {
                                    mat(xn->ensure_grad(), din, T).noalias() +=
                                        cmat(wn->value, dout, din).transpose() * dY;
                                  }
                                });
}

template <typename S>
Tensor<S> layer_norm(const Tensor<S>& x, const Tensor<S>& gain, const Tensor<S>& shift, double eps) {
  require_rank2(x, "layer_norm");
  const auto d = static_cast<Eigen::Index>(x.dim(0));
  const auto T = static_cast<Eigen::Index>(x.dim(1));
  if (d < 1) throw ShapeError("layer_norm: d must be >= 1");
  if (static_cast<Eigen::Index>(gain.numel()) != d || static_cast<Eigen::Index>(shift.numel()) != d) {
    throw ShapeError("layer_norm: gain/shift length != d");
  }

  const auto X = cmat(x.node()->value, d, T);
  const Eigen::Matrix<S, 1, Eigen::Dynamic> mu = X.colwise().mean();
  detail::RowMat<S> xhat = X.rowwise() - mu;
  const Eigen::Matrix<S, 1, Eigen::Dynamic> inv_sigma =
      ((xhat.array().square().colwise().sum() / static_cast<S>(d)) + static_cast<S>(eps)).rsqrt();
  xhat.array().rowwise() *= inv_sigma.array();

  std::vector<S> out(static_cast<std::size_t>(d * T));
  auto Y = mat(out, d, T);
  const auto g = detail::ConstVecMap<S>(gain.values().data(), d);
  const auto sh = detail::ConstVecMap<S>(shift.values().data(), d);
  Y = (xhat.array().colwise() * g.array()).colwise() + sh.array();

  auto xn = x.node_ptr(), gn = gain.node_ptr(), sn = shift.node_ptr();
  return Tensor<S>::make_result(
      x.shape(), std::move(out), {xn, gn, sn},
      [xn, gn, sn, xhat = std::move(xhat), inv_sigma, d, T](Node<S>& self) {
        const auto dY = cmat(self.grad, d, T);
        if (sn->requires_grad) detail::add_row_sums(sn->ensure_grad().data(), dY);
        if (gn->requires_grad) {
          detail::add_row_sums(gn->ensure_grad().data(), dY.array() * xhat.array());
        }
        if (xn->requires_grad) {
          const auto g = detail::ConstVecMap<S>(gn->value.data(), d);
          const detail::RowMat<S> dxhat = dY.array().colwise() * g.array();
          const Eigen::Matrix<S, 1, Eigen::Dynamic> m1 = dxhat.colwise().mean();
          const Eigen::Matrix<S, 1, Eigen::Dynamic> m2 = (dxhat.array() * xhat.array()).colwise().mean();
          auto dX = mat(xn->ensure_grad(), d, T);
          dX.array() += ((dxhat.rowwise() - m1).array() - xhat.array().rowwise() * m2.array()).rowwise() *
                        inv_sigma.array();
        }
      });
}

template <typename S>
Tensor<S> mse_loss(const Tensor<S>& pred, std::span<const S> target) {
  if (pred.numel() != target.size()) {
    throw ShapeError("mse_loss: prediction has " + std::to_string(pred.numel()) + " values, target " +
                     std::to_string(target.size()));
  }
  if (target.empty()) throw ShapeError("mse_loss: empty input");
  const auto pv = pred.values();
  const std::size_t n = target.size();
  std::vector<S> diff(n);
  S acc{0};
  for (std::size_t i = 0; i < n; ++i) {
    diff[i] = pv[i] - target[i];
    acc += diff[i] * diff[i];
  }
  auto pn = pred.node_ptr();
  return Tensor<S>::make_result({1}, {acc / static_cast<S>(n)}, {pn}, [pn, diff = std::move(diff)](Node<S>& self) {
    auto& g = pn->ensure_grad();
    const S scale = S{2} * self.grad[0] / static_cast<S>(diff.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += scale * diff[i];
  });
}

template <typename S>
std::vector<S> sinusoidal_positional_encoding(std::size_t d, std::size_t t) {
  if (d == 0 || d % 2 != 0) throw InvalidArgument("positional encoding: d must be even and positive");
  std::vector<S> pe(d * t);
  for (std::size_t i = 0; i < d / 2; ++i) {
    const double rate = std::pow(10000.0, -2.0 * static_cast<double>(i) / static_cast<double>(d));
    for (std::size_t pos = 0; pos < t; ++pos) {
      const double a = static_cast<double>(pos) * rate;
      pe[(2 * i) * t + pos] = static_cast<S>(std::sin(a));
      pe[(2 * i + 1) * t + pos] = static_cast<S>(std::cos(a));
    }
  }
  return pe;
}

#define RADARPPG_INSTANTIATE(S)                                                                    \
  template Tensor<S> add(const Tensor<S>&, const Tensor<S>&);                                      \
  template Tensor<S> relu(const Tensor<S>&);                                                       \
  template Tensor<S> dropout(const Tensor<S>&, double, std::mt19937_64&, bool);                    \
  template Tensor<S> conv1d(const Tensor<S>&, const Tensor<S>&, const Tensor<S>&);                 \
  template Tensor<S> linear(const Tensor<S>&, const Tensor<S>&, const Tensor<S>&);                 \
  template Tensor<S> layer_norm(const Tensor<S>&, const Tensor<S>&, const Tensor<S>&, double);     \
  template Tensor<S> mse_loss(const Tensor<S>&, std::span<const S>);                               \
  template std::vector<S> sinusoidal_positional_encoding<S>(std::size_t, std::size_t);

RADARPPG_INSTANTIATE(float)
RADARPPG_INSTANTIATE(double)

#undef RADARPPG_INSTANTIATE

}  // namespace radarppg::nn
