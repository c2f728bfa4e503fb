// SPDX-License-Identifier: Apache-2.0
#include "radarppg/nn/attention.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include "eigen_maps.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/nn/ops.hpp"

namespace radarppg::nn {

using detail::RowMat;

namespace {
// Query rows are processed in blocks so each score block stays in cache
// through the softmax and the value product.
constexpr Eigen::Index kBlock = 128;

// The heads x T x T weights are the largest allocation in training and are
// needed again in the backward pass. Recycling the buffers avoids paying for
// fresh zeroed pages on every forward.
template <typename S>
class BufferPool {
 public:
  // Aligned storage keeps Eigen's vectorized exp and sums on the same lanes
  // for every buffer, so softmax results do not depend on the allocation.
  using Buffer = std::vector<S, Eigen::aligned_allocator<S>>;

  std::shared_ptr<Buffer> acquire(std::size_t n) {
    Buffer buf;
    {
      std::lock_guard lock(mutex_);
      auto it = std::find_if(free_.begin(), free_.end(), [n](const auto& b) { return b.capacity() >= n; });
      if (it != free_.end()) {
        buf = std::move(*it);
        free_.erase(it);
      }
    }
    buf.resize(n);
    return std::shared_ptr<Buffer>(new Buffer(std::move(buf)), [this](Buffer* b) {
      {
        std::lock_guard lock(mutex_);
        if (free_.size() < kMaxFree) free_.push_back(std::move(*b));
      }
      delete b;
    });
  }

 private:
  static constexpr std::size_t kMaxFree = 8;
  std::mutex mutex_;
  std::vector<Buffer> free_;
};

template <typename S>
BufferPool<S>& weight_pool() {
  static BufferPool<S> pool;
  return pool;
}
}  // namespace

template <typename S>
Tensor<S> scaled_dot_product_attention(const Tensor<S>& q, const Tensor<S>& k, const Tensor<S>& v,
                                       std::size_t heads, std::vector<S>* weights_out) {
  if (q.rank() != 2 || q.shape() != k.shape() || q.shape() != v.shape()) {
    throw ShapeError("attention: q, k, v must share a d x T shape");
  }
  const std::size_t d = q.dim(0), t = q.dim(1);
  if (heads == 0 || d % heads != 0) {
    throw ShapeError("attention: d = " + std::to_string(d) + " is not divisible by heads = " + std::to_string(heads));
  }
  const auto dh = static_cast<Eigen::Index>(d / heads);
  const auto T = static_cast<Eigen::Index>(t);
  const S scale = static_cast<S>(1.0 / std::sqrt(static_cast<double>(dh)));

  using CMap = detail::ConstMatMap<S>;
  using Map = detail::MatMap<S>;

  auto probs = weight_pool<S>().acquire(heads * t * t);
  std::vector<S> out(d * t);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * static_cast<std::size_t>(dh) * t;
    const CMap Qh(q.values().data() + off, dh, T);
    const CMap Kh(k.values().data() + off, dh, T);
    const CMap Vh(v.values().data() + off, dh, T);
    Map Oh(out.data() + off, dh, T);
    Map P(probs->data() + h * t * t, T, T);
    for (Eigen::Index r0 = 0; r0 < T; r0 += kBlock) {
      const auto nb = std::min(kBlock, T - r0);
      auto Pb = P.middleRows(r0, nb);
      Pb.noalias() = Qh.middleCols(r0, nb).transpose() * Kh;  // row i: query r0 + i against every key
      for (Eigen::Index i = 0; i < nb; ++i) {
        auto row = Pb.row(i).array();
        const S m = row.maxCoeff();
        row = ((row - m) * scale).exp();
        row /= row.sum();
      }
      Oh.middleCols(r0, nb).noalias() = Vh * Pb.transpose();
    }
  }
  if (weights_out) {
    weights_out->resize(heads * t * t);
    std::copy(probs->begin(), probs->end(), weights_out->begin());
  }

  auto qn = q.node_ptr(), kn = k.node_ptr(), vn = v.node_ptr();
  return Tensor<S>::make_result(
      q.shape(), std::move(out), {qn, kn, vn},
      [qn, kn, vn, probs = std::move(probs), heads, dh, T, scale](Node<S>& self) {
        const bool need_qk = qn->requires_grad || kn->requires_grad;
        RowMat<S> dP;
        Eigen::Matrix<S, Eigen::Dynamic, 1> rowdot;
        for (std::size_t h = 0; h < heads; ++h) {
          const std::size_t off = h * static_cast<std::size_t>(dh * T);
          const CMap P(probs->data() + h * static_cast<std::size_t>(T * T), T, T);
          const CMap dOh(self.grad.data() + off, dh, T);
          const CMap Vh(vn->value.data() + off, dh, T);
          const CMap Qh(qn->value.data() + off, dh, T);
          const CMap Kh(kn->value.data() + off, dh, T);
          S* dq = qn->requires_grad ? qn->ensure_grad().data() + off : nullptr;
          S* dk = kn->requires_grad ? kn->ensure_grad().data() + off : nullptr;
          S* dv = vn->requires_grad ? vn->ensure_grad().data() + off : nullptr;
          for (Eigen::Index r0 = 0; r0 < T; r0 += kBlock) {
            const auto nb = std::min(kBlock, T - r0);
            const auto Pb = P.middleRows(r0, nb);
            const auto dOb = dOh.middleCols(r0, nb);
            if (dv) Map(dv, dh, T).noalias() += dOb * Pb;
            if (!need_qk) continue;
            dP.noalias() = dOb.transpose() * Vh;
            rowdot = (Pb.array() * dP.array()).rowwise().sum();
            // dS, scaled by 1/sqrt(dh), reusing dP's storage.
            dP.array() = (Pb.array() * (dP.array().colwise() - rowdot.array())) * scale;
            if (dq) Map(dq, dh, T).middleCols(r0, nb).noalias() += Kh * dP.transpose();
            if (dk) Map(dk, dh, T).noalias() += Qh.middleCols(r0, nb) * dP;
          }
        }
      });
}

template <typename S>
Tensor<S> multi_head_self_attention(const Tensor<S>& x, const MhsaParams<S>& p, std::size_t heads,
                                    std::vector<S>* weights_out) {
  if (x.rank() != 2) throw ShapeError("multi_head_self_attention: expected d x T input");
  if (heads == 0 || x.dim(0) % heads != 0) {
    throw ShapeError("multi_head_self_attention: d = " + std::to_string(x.dim(0)) +
                     " is not divisible by heads = " + std::to_string(heads));
  }
  const auto q = linear(x, p.wq, p.bq);
  const auto k = linear(x, p.wk, p.bk);
  const auto v = linear(x, p.wv, p.bv);
  return linear(scaled_dot_product_attention(q, k, v, heads, weights_out), p.wo, p.bo);
}

template Tensor<float> scaled_dot_product_attention(const Tensor<float>&, const Tensor<float>&,
                                                    const Tensor<float>&, std::size_t, std::vector<float>*);
template Tensor<double> scaled_dot_product_attention(const Tensor<double>&, const Tensor<double>&,
                                                     const Tensor<double>&, std::size_t, std::vector<double>*);
template Tensor<float> multi_head_self_attention(const Tensor<float>&, const MhsaParams<float>&, std::size_t,
                                                 std::vector<float>*);
template Tensor<double> multi_head_self_attention(const Tensor<double>&, const MhsaParams<double>&, std::size_t,
                                                  std::vector<double>*);

}  // namespace radarppg::nn
