// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace radarppg::nn::detail {

template <typename S>
using RowMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MatMap = Eigen::Map<RowMat<S>>;
template <typename S>
using ConstMatMap = Eigen::Map<const RowMat<S>>;
template <typename S>
using VecMap = Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, 1>>;
template <typename S>
using ConstVecMap = Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>>;

template <typename S>
MatMap<S> mat(std::vector<S>& v, Eigen::Index rows, Eigen::Index cols) {
  return MatMap<S>(v.data(), rows, cols);
}
template <typename S>
ConstMatMap<S> cmat(const std::vector<S>& v, Eigen::Index rows, Eigen::Index cols) {
  return ConstMatMap<S>(v.data(), rows, cols);
}

/// out[r] += sum_c m(r, c), summed left to right. Eigen's own reductions on a
/// Map peel a scalar prefix up to the next aligned address, which makes the
/// rounding depend on where the allocator put the buffer.
template <typename S, typename Derived>
void add_row_sums(S* out, const Eigen::DenseBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    S acc{0};
    for (Eigen::Index c = 0; c < m.cols(); ++c) acc += m.coeff(r, c);
    out[r] += acc;
  }
}

}  // namespace radarppg::nn::detail
