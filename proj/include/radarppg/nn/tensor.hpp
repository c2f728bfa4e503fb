// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace radarppg::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

template <typename S>
struct Node {
  Shape shape;
  std::vector<S> value;
  std::vector<S> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  /// Propagates this node's grad into its parents' grads.
  std::function<void(Node&)> backward_fn;

  std::vector<S>& ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), S{0});
    return grad;
  }
};

/// Handle to a node of the autodiff graph. Copies share the node. Leaves
/// created with requires_grad accumulate gradients across backward passes;
/// intermediate nodes are released when the last handle goes away.
template <typename S>
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<S> values, bool requires_grad = false);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const S> values() const { return node_->value; }
  std::span<S> mutable_values() { return node_->value; }
  /// Empty span when no gradient has been accumulated.
  std::span<const S> grad() const { return node_->grad; }
  std::span<S> mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();

  S item() const;

  /// Reverse-mode sweep from this scalar node; `seed` is dLoss/dThis.
  /// Every reachable node is visited once, in reverse topological order.
  void backward(S seed = S{1}) const;

  Node<S>* node() const noexcept { return node_.get(); }
  const std::shared_ptr<Node<S>>& node_ptr() const noexcept { return node_; }

  /// Creates an op output whose requires_grad is inherited from its parents.
  static Tensor make_result(Shape shape, std::vector<S> values, std::vector<std::shared_ptr<Node<S>>> parents,
                            std::function<void(Node<S>&)> backward_fn);

 private:
  std::shared_ptr<Node<S>> node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace radarppg::nn
