// SPDX-License-Identifier: Apache-2.0
#include "radarppg/nn/tensor.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

#include "radarppg/errors.hpp"

namespace radarppg::nn {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename S>
Tensor<S> Tensor<S>::zeros(Shape shape, bool requires_grad) {
  const auto n = shape_numel(shape);
  return from(std::move(shape), std::vector<S>(n, S{0}), requires_grad);
}

template <typename S>
Tensor<S> Tensor<S>::from(Shape shape, std::vector<S> values, bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("Tensor::from: " + std::to_string(values.size()) + " values for shape " + shape_string(shape));
  }
  Tensor t;
  t.node_ = std::make_shared<Node<S>>();
  t.node_->shape = std::move(shape);
  t.node_->value = std::move(values);
  t.node_->requires_grad = requires_grad;
  return t;
}

template <typename S>
Tensor<S> Tensor<S>::make_result(Shape shape, std::vector<S> values, std::vector<std::shared_ptr<Node<S>>> parents,
                                 std::function<void(Node<S>&)> backward_fn) {
  Tensor t = from(std::move(shape), std::move(values), false);
  const bool rg = std::any_of(parents.begin(), parents.end(), [](const auto& p) { return p->requires_grad; });
  if (rg) {
    t.node_->requires_grad = true;
    t.node_->parents = std::move(parents);
    t.node_->backward_fn = std::move(backward_fn);
  }
  return t;
}

template <typename S>
void Tensor<S>::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), S{0});
}

template <typename S>
S Tensor<S>::item() const {
  if (numel() != 1) throw ShapeError("Tensor::item on a tensor of shape " + shape_string(shape()));
  return node_->value[0];
}

template <typename S>
void Tensor<S>::backward(S seed) const {
  if (numel() != 1) throw ShapeError("backward() requires a scalar, got " + shape_string(shape()));
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order without recursion.
  std::vector<Node<S>*> order;
  std::unordered_set<Node<S>*> seen;
  std::vector<std::pair<Node<S>*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node<S>* p = n->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->ensure_grad()[0] += seed;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<S>* n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace radarppg::nn
