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

#include "infracls/model.hpp"

#include <algorithm>

namespace infracls {

template <typename T>
std::size_t ParameterGroup<T>::count() const {
  std::size_t n = 0;
  for (const Parameter<T>* p : params) n += p->value.size();
  return n;
}

template <typename T>
Tensor<T> Model<T>::logits(const Tensor<T>& batch, Mode mode) {
  Tape<T> tape(false);
  Var out = forward(tape, tape.constant(batch), mode);
  return tape.value(out);
}

template <typename T>
std::vector<Parameter<T>*> Model<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& group : parameter_groups()) out.insert(out.end(), group.params.begin(), group.params.end());
  return out;
}

template <typename T>
std::size_t Model<T>::parameter_count() {
  std::size_t n = 0;
  for (const auto& group : parameter_groups()) n += group.count();
  return n;
}

template <typename T>
void Model<T>::zero_grad() {
  for (Parameter<T>* p : parameters()) p->zero_grad();
}

template <typename T>
std::vector<std::pair<std::string, Tensor<T>*>> Model<T>::named_tensors() {
  std::vector<std::pair<std::string, Tensor<T>*>> out;
  for (Parameter<T>* p : parameters()) out.emplace_back(p->name, &p->value);
  for (const NamedBuffer<T>& b : buffers()) out.emplace_back(b.name, b.tensor);
  return out;
}

template <typename T>
std::vector<Tensor<T>> Model<T>::snapshot() {
  std::vector<Tensor<T>> out;
  for (const auto& [name, tensor] : named_tensors()) out.push_back(*tensor);
  return out;
}

template <typename T>
void Model<T>::restore(const std::vector<Tensor<T>>& state) {
  auto named = named_tensors();
  if (named.size() != state.size()) {
    throw ShapeError("restore: model has " + std::to_string(named.size()) + " tensors, state has " +
                     std::to_string(state.size()));
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    if (named[i].second->shape() != state[i].shape()) {
      throw ShapeError("restore: " + named[i].first + " expects " + to_string(named[i].second->shape()) +
                       ", state has " + to_string(state[i].shape()));
    }
    const bool flag = named[i].second->requires_grad();
    *named[i].second = state[i];
    named[i].second->set_requires_grad(flag);
  }
}

template <typename T>
void Model<T>::check_input(const Tensor<T>& input) const {
  const Shape expected = sample_shape();
  const Shape& got = input.shape();
  if (got.size() != expected.size() + 1 || !std::equal(expected.begin(), expected.end(), got.begin() + 1)) {
    Shape want{0};
    want.insert(want.end(), expected.begin(), expected.end());
    std::string w = to_string(want);
    w.replace(1, 1, "B");
    throw ShapeError(architecture() + ": expected input " + w + ", got " + to_string(got));
  }
}

template <typename T>
std::uint64_t state_hash(Model<T>& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, tensor] : model.named_tensors()) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(tensor->raw());
    for (std::size_t i = 0; i < tensor->size() * sizeof(T); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

template struct ParameterGroup<float>;
template struct ParameterGroup<double>;
template class Model<float>;
template class Model<double>;
template std::uint64_t state_hash(Model<float>&);
template std::uint64_t state_hash(Model<double>&);

}  // namespace infracls
