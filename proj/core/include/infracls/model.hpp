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

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "infracls/layers.hpp"

namespace infracls {

template <typename T>
struct ParameterGroup {
  std::string label;
  std::vector<Parameter<T>*> params;

  std::size_t count() const;
};

/// Ordered parameterized layers with named parameter groups. Groups are
/// ordered from the input to the output and partition the parameters.
template <typename T>
class Model {
 public:
  virtual ~Model() = default;

  /// "inception_time" or "small_resnet".
  virtual std::string architecture() const = 0;
  /// Per-sample input shape, e.g. [1,94] or [3,94,94].
  virtual Shape sample_shape() const = 0;
  virtual std::size_t n_classes() const = 0;
  /// Architecture hyperparameters, enough to rebuild an identical model.
  virtual nlohmann::json config_json() const = 0;

  /// Logits [B, n_classes] for an input [B, sample_shape...].
  virtual Var forward(Tape<T>& tape, Var input, Mode mode) = 0;
  virtual std::vector<ParameterGroup<T>> parameter_groups() = 0;
  virtual std::vector<NamedBuffer<T>> buffers() = 0;

  /// Gradient-free forward pass.
  Tensor<T> logits(const Tensor<T>& batch, Mode mode);

  std::vector<Parameter<T>*> parameters();
  std::size_t parameter_count();
  void zero_grad();

  /// Parameters then buffers, each with its checkpoint name.
  std::vector<std::pair<std::string, Tensor<T>*>> named_tensors();
  /// Copies of every parameter and buffer, in named_tensors() order.
  std::vector<Tensor<T>> snapshot();
  void restore(const std::vector<Tensor<T>>& state);

 protected:
  /// Rejects inputs whose trailing extents differ from sample_shape().
  void check_input(const Tensor<T>& input) const;
};

/// FNV-1a 64 over the raw bytes of every parameter and buffer.
template <typename T>
std::uint64_t state_hash(Model<T>& model);

}  // namespace infracls
