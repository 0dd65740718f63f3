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

#include "infracls/tape.hpp"

#include <stdexcept>

namespace infracls {

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(Var v) const {
  if (v.id >= nodes_.size()) throw std::out_of_range("tape variable " + std::to_string(v.id) + " does not exist");
  return nodes_[v.id];
}

template <typename T>
typename Tape<T>::Node& Tape<T>::node(Var v) {
  if (v.id >= nodes_.size()) throw std::out_of_range("tape variable " + std::to_string(v.id) + " does not exist");
  return nodes_[v.id];
}

template <typename T>
Var Tape<T>::leaf(Tensor<T> value) {
  Node n;
  n.op = "leaf";
  n.requires_grad = grad_enabled_ && value.requires_grad();
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::constant(Tensor<T> value) {
  value.set_requires_grad(false);
  return leaf(std::move(value));
}

template <typename T>
Var Tape<T>::param(Parameter<T>& p) {
  Node n;
  n.op = "param";
  n.ref = &p.value;
  n.param = &p;
  n.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Tape<T>::record(std::string_view op, Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(op, std::move(value), std::vector<Var>(inputs), std::move(fn));
}

template <typename T>
Var Tape<T>::record(std::string_view op, Tensor<T> value, const std::vector<Var>& inputs, BackwardFn fn) {
  Node n;
  n.op = op;
  n.owned = std::move(value);
  if (grad_enabled_) {
    for (Var in : inputs) {
      if (in.valid() && node(in).requires_grad) {
        n.requires_grad = true;
        break;
      }
    }
  }
  if (n.requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

template <typename T>
const Tensor<T>& Tape<T>::value(Var v) const {
  const Node& n = node(v);
  return n.ref != nullptr ? *n.ref : n.owned;
}

template <typename T>
Tensor<T>& Tape<T>::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.empty()) n.grad = Tensor<T>(value(v).shape());
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var loss) {
  const Tensor<T>& out = value(loss);
  if (out.size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " + to_string(out.shape()));
  }
  if (!node(loss).requires_grad) {
    throw std::logic_error("backward(): loss does not depend on any tensor that requires gradients");
  }
  trace_.clear();
  grad_buffer(loss).fill(T{1});
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.grad.empty()) continue;
    if (n.backward) {
      n.backward(*this, Var{id});
      trace_.push_back(id);
    }
    if (n.param != nullptr) {
      Parameter<T>& p = *n.param;
      if (p.grad.shape() != p.value.shape()) p.zero_grad();
      for (std::size_t i = 0; i < n.grad.size(); ++i) p.grad[i] += n.grad[i];
    }
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace infracls
