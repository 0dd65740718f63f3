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

#include <cstdint>
#include <memory>
#include <vector>

#include "infracls/model.hpp"

namespace infracls {

struct InceptionConfig {
  std::size_t in_channels = 1;
  std::size_t n_classes = 8;
  std::size_t depth = 6;
  std::size_t filters = 32;  ///< per branch; concatenated width is 4x this
  std::size_t bottleneck_channels = 32;
  std::vector<std::size_t> kernel_sizes{39, 19, 9};
  std::size_t residual_every = 3;
  std::size_t input_length = 94;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Width of the concatenated branch output.
  std::size_t feature_width() const { return (kernel_sizes.size() + 1) * filters; }
  std::size_t residual_joins() const { return depth / residual_every; }

  nlohmann::json to_json() const;
  static InceptionConfig from_json(const nlohmann::json& j);
};

/// Parallel multi-scale convolution block: optional 1x1 bottleneck, one
/// same-padded conv per kernel size, a maxpool + 1x1 conv branch on the raw
/// input, then concat, batchnorm and relu.
template <typename T>
class InceptionModule {
 public:
  InceptionModule(const std::string& name, std::size_t in_channels, const InceptionConfig& cfg, SplitMix64& rng);

  Var forward(Tape<T>& tape, Var x, Mode mode);
  void collect(std::vector<Parameter<T>*>& out);
  void collect_buffers(std::vector<NamedBuffer<T>>& out);

  std::size_t in_channels;
  std::optional<Conv1dLayer<T>> bottleneck;
  std::vector<Conv1dLayer<T>> convs;
  Conv1dLayer<T> pool_conv;
  BatchNormLayer<T> norm;
};

/// 1x1 conv + batchnorm on the residual path.
template <typename T>
struct InceptionShortcut {
  InceptionShortcut(const std::string& name, std::size_t in_channels, std::size_t out_channels, SplitMix64& rng);

  Conv1dLayer<T> conv;
  BatchNormLayer<T> norm;
};

/// InceptionTime-style classifier: depth inception modules with a residual
/// join every residual_every modules, global average pooling and a linear
/// head from the feature width to n_classes.
template <typename T>
class InceptionTime final : public Model<T> {
 public:
  InceptionTime(InceptionConfig cfg, std::uint64_t seed);

  std::string architecture() const override { return "inception_time"; }
  Shape sample_shape() const override { return {cfg_.in_channels, cfg_.input_length}; }
  std::size_t n_classes() const override { return cfg_.n_classes; }
  nlohmann::json config_json() const override { return cfg_.to_json(); }

  Var forward(Tape<T>& tape, Var input, Mode mode) override;
  /// One group per inception module (with the shortcut that joins after it),
  /// then the head.
  std::vector<ParameterGroup<T>> parameter_groups() override;
  std::vector<NamedBuffer<T>> buffers() override;

  const InceptionConfig& config() const { return cfg_; }
  std::vector<InceptionModule<T>>& modules() { return modules_; }
  LinearLayer<T>& head() { return head_; }
  /// Output of global average pooling for the last forward() call on \p tape.
  Var pooled_features() const { return pooled_; }

 private:
  bool joins_after(std::size_t d) const { return (d + 1) % cfg_.residual_every == 0; }

  InceptionConfig cfg_;
  std::vector<InceptionModule<T>> modules_;
  std::vector<InceptionShortcut<T>> shortcuts_;
  LinearLayer<T> head_;
  Var pooled_;
};

/// Builds the network, validating the configuration first.
template <typename T>
std::unique_ptr<InceptionTime<T>> build_inception_time(const InceptionConfig& cfg, std::uint64_t seed);

}  // namespace infracls
