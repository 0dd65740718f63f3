// Copyright 2026 The infracls Authors
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

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "infracls/tensor.hpp"

namespace infracls {

/// Trainable tensor with its accumulated gradient.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string n, Tensor<T> v) : name(std::move(n)), value(std::move(v)), grad(value.shape()) {
    value.set_requires_grad(true);
  }

  void zero_grad() {
    if (grad.shape() != value.shape()) grad = Tensor<T>(value.shape());
    grad.fill(T{0});
  }
};

/// Handle to a node recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const noexcept { return id != kNone; }
};

/// Reverse-mode gradient tape. Operations append nodes in execution order;
/// backward() visits them in exact reverse order and accumulates gradients
/// into the inputs of each op, then into bound Parameters.
///
/// A tape is single-writer: one training step builds and consumes one tape.
template <typename T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, Var out)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  bool grad_enabled() const noexcept { return grad_enabled_; }

  /// Leaf holding a copy of \p value; tracks gradients when value.requires_grad().
  Var leaf(Tensor<T> value);
  /// Leaf that never tracks gradients.
  Var constant(Tensor<T> value);
  /// Leaf bound to a parameter: the value is referenced, not copied, and the
  /// gradient is added to p.grad during backward().
  Var param(Parameter<T>& p);

  /// Appends the result of an op. The backward function is kept only when
  /// gradients are enabled and at least one input requires them.
  Var record(std::string_view op, Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(std::string_view op, Tensor<T> value, const std::vector<Var>& inputs, BackwardFn fn);

  const Tensor<T>& value(Var v) const;
  bool requires_grad(Var v) const { return node(v).requires_grad; }
  std::string_view op_name(Var v) const { return node(v).op; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Gradient accumulated for \p v; empty when nothing reached it.
  const Tensor<T>& grad(Var v) const { return node(v).grad; }

  /// Zero-initialized gradient buffer of \p v, for use by backward functions.
  Tensor<T>& grad_buffer(Var v);

  /// Runs reverse accumulation from a scalar loss.
  void backward(Var loss);

  /// Node ids whose backward function ran, in visiting order.
  const std::vector<std::size_t>& backward_trace() const noexcept { return trace_; }

 private:
  struct Node {
    std::string_view op;
    Tensor<T> owned;
    const Tensor<T>* ref = nullptr;
    Parameter<T>* param = nullptr;
    Tensor<T> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  const Node& node(Var v) const;
  Node& node(Var v);

  std::deque<Node> nodes_;  // stable addresses: values stay valid while recording
  std::vector<std::size_t> trace_;
  bool grad_enabled_;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace infracls
