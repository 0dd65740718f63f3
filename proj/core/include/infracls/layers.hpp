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

#include <optional>
#include <string>
#include <vector>

#include "infracls/ops.hpp"
#include "infracls/random.hpp"

namespace infracls {

/// Named non-trainable state (batchnorm running statistics).
template <typename T>
struct NamedBuffer {
  std::string name;
  Tensor<T>* tensor;
};

/// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights.
template <typename T>
Tensor<T> fan_in_uniform(Shape shape, std::size_t fan_in, SplitMix64& rng);

template <typename T>
class Conv1dLayer {
 public:
  Conv1dLayer(const std::string& name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
              bool with_bias, SplitMix64& rng);

  Var forward(Tape<T>& tape, Var x);
  void collect(std::vector<Parameter<T>*>& out);

  Parameter<T> weight;
  std::optional<Parameter<T>> bias;
};

template <typename T>
class Conv2dLayer {
 public:
  Conv2dLayer(const std::string& name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
              std::size_t stride, bool with_bias, SplitMix64& rng);

  Var forward(Tape<T>& tape, Var x);
  void collect(std::vector<Parameter<T>*>& out);

  Parameter<T> weight;
  std::optional<Parameter<T>> bias;
  std::size_t stride;
};

template <typename T>
class BatchNormLayer {
 public:
  BatchNormLayer(const std::string& name, std::size_t channels);

  Var forward(Tape<T>& tape, Var x, Mode mode);
  void collect(std::vector<Parameter<T>*>& out);
  void collect_buffers(std::vector<NamedBuffer<T>>& out);

  Parameter<T> gamma;
  Parameter<T> beta;
  Tensor<T> running_mean;
  Tensor<T> running_var;
  std::string name;
  BatchNormOptions options;
};

template <typename T>
class LinearLayer {
 public:
  LinearLayer(const std::string& name, std::size_t in_features, std::size_t out_features, SplitMix64& rng);

  Var forward(Tape<T>& tape, Var x);
  void collect(std::vector<Parameter<T>*>& out);

  Parameter<T> weight;
  Parameter<T> bias;
};

}  // namespace infracls
