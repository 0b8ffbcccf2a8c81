// Copyright 2026 The INSET Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense 2-D tensors with a define-by-run reverse-mode gradient tape.
//
// Every tensor is a row-major matrix; vectors are 1 x n rows. A tensor is a
// cheap handle onto a shared graph node, so copies alias the same value and
// gradient. The graph is rebuilt on every forward pass and released when the
// last handle onto its root goes away.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "inset/errors.hpp"

namespace inset {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

namespace detail {
inline thread_local bool grad_mode_enabled = true;
}  // namespace detail

/// Disables graph recording on this thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard() : previous_(detail::grad_mode_enabled) {
    detail::grad_mode_enabled = false;
  }
  ~NoGradGuard() { detail::grad_mode_enabled = previous_; }
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

inline bool grad_mode_enabled() { return detail::grad_mode_enabled; }

template <typename Scalar>
struct Node {
  Matrix<Scalar> value;
  Matrix<Scalar> grad;
  bool has_grad = false;
  bool requires_grad = false;
  bool frozen = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  template <typename Derived>
  void accumulate(const Eigen::MatrixBase<Derived>& g) {
    if (!requires_grad) return;
    if (!has_grad) {
      grad = g;
      has_grad = true;
    } else {
      grad += g;
    }
  }
};

template <typename Scalar>
class Tensor {
 public:
  using scalar_type = Scalar;
  using matrix_type = Matrix<Scalar>;
  using node_type = Node<Scalar>;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<node_type> node) : node_(std::move(node)) {}

  /// A leaf that never receives gradients.
  static Tensor constant(matrix_type value) {
    auto node = std::make_shared<node_type>();
    node->value = std::move(value);
    return Tensor(std::move(node));
  }

  /// A trainable leaf.
  static Tensor parameter(matrix_type value) {
    auto node = std::make_shared<node_type>();
    node->value = std::move(value);
    node->requires_grad = true;
    return Tensor(std::move(node));
  }

  static Tensor scalar(Scalar v) {
    matrix_type m(1, 1);
    m(0, 0) = v;
    return constant(std::move(m));
  }

  bool defined() const { return static_cast<bool>(node_); }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  Index size() const { return node_->value.size(); }
  std::array<Index, 2> shape() const { return {rows(), cols()}; }

  std::string shape_string() const {
    return "[" + std::to_string(rows()) + "x" + std::to_string(cols()) + "]";
  }

  const matrix_type& value() const { return node_->value; }
  matrix_type& mutable_value() { return node_->value; }

  bool has_grad() const { return node_->has_grad; }
  const matrix_type& grad() const {
    if (!node_->has_grad) throw ContractError("tensor has no gradient");
    return node_->grad;
  }

  bool requires_grad() const { return node_->requires_grad; }
  bool frozen() const { return node_->frozen; }

  /// Frozen tensors are excluded from backpropagation and optimizer updates.
  void set_frozen(bool frozen) {
    node_->frozen = frozen;
    node_->requires_grad = !frozen;
    zero_grad();
  }

  void zero_grad() {
    node_->has_grad = false;
    node_->grad.resize(0, 0);
  }

  Scalar item() const {
    if (size() != 1) {
      throw ShapeError("item() on non-scalar tensor " + shape_string());
    }
    return node_->value(0, 0);
  }

  node_type* node() const { return node_.get(); }
  const std::shared_ptr<node_type>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<node_type> node_;
};

namespace detail {

template <typename Scalar, typename Backward>
Tensor<Scalar> make_op(Matrix<Scalar> value,
                       std::initializer_list<Tensor<Scalar>> inputs,
                       Backward&& backward) {
  auto node = std::make_shared<Node<Scalar>>();
  node->value = std::move(value);
  if (grad_mode_enabled) {
    bool any = false;
    for (const auto& t : inputs) any = any || t.requires_grad();
    if (any) {
      node->requires_grad = true;
      node->parents.reserve(inputs.size());
      for (const auto& t : inputs) node->parents.push_back(t.node_ptr());
      node->backward_fn = std::forward<Backward>(backward);
    }
  }
  return Tensor<Scalar>(std::move(node));
}

template <typename Scalar>
Tensor<Scalar> make_op_n(Matrix<Scalar> value,
                         const std::vector<Tensor<Scalar>>& inputs,
                         std::function<void(Node<Scalar>&)> backward) {
  auto node = std::make_shared<Node<Scalar>>();
  node->value = std::move(value);
  if (grad_mode_enabled) {
    bool any = false;
    for (const auto& t : inputs) any = any || t.requires_grad();
    if (any) {
      node->requires_grad = true;
      for (const auto& t : inputs) node->parents.push_back(t.node_ptr());
      node->backward_fn = std::move(backward);
    }
  }
  return Tensor<Scalar>(std::move(node));
}

inline std::string dims(Index r, Index c) {
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

}  // namespace detail

/// Runs reverse-mode accumulation from a scalar root. Gradients accumulate
/// into every reachable tensor that requires them; frozen tensors get none.
template <typename Scalar>
void backward(const Tensor<Scalar>& root) {
  if (!root.defined() || root.rows() != 1 || root.cols() != 1) {
    throw ContractError("backward() requires a scalar root, got " +
                        (root.defined() ? root.shape_string() : "undefined"));
  }
  if (!root.requires_grad()) {
    throw ContractError("backward(): root does not depend on any trainable tensor");
  }

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<Node<Scalar>*> order;
  std::unordered_set<Node<Scalar>*> visited;
  std::vector<std::pair<Node<Scalar>*, std::size_t>> stack;
  stack.emplace_back(root.node(), 0);
  visited.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<Scalar>* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->accumulate(Matrix<Scalar>::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<Scalar>* node = *it;
    if (node->backward_fn && node->has_grad) node->backward_fn(*node);
  }
}

}  // namespace inset
