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

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "infracls/model.hpp"

namespace infracls {

struct ResNet2DConfig {
  std::size_t in_channels = 3;
  std::size_t n_classes = 8;
  std::vector<std::size_t> stage_widths{16, 32, 64};
  std::size_t blocks_per_stage = 2;
  std::array<std::size_t, 2> input_size{94, 94};

  void validate() const;
  /// Spatial height after the stem and after each stage (ceil division by 2
  /// for every stage but the first).
  std::vector<std::size_t> spatial_trace() const;

  nlohmann::json to_json() const;
  static ResNet2DConfig from_json(const nlohmann::json& j);
};

/// Two 3x3 conv + batchnorm layers added to an identity (or 1x1 strided
/// conv + batchnorm) shortcut, then relu.
template <typename T>
class BasicBlock {
 public:
  BasicBlock(const std::string& name, std::size_t in_channels, std::size_t out_channels, std::size_t stride,
             SplitMix64& rng);

  Var forward(Tape<T>& tape, Var x, Mode mode);
  void collect(std::vector<Parameter<T>*>& out);
  void collect_buffers(std::vector<NamedBuffer<T>>& out);

  Conv2dLayer<T> conv1;
  BatchNormLayer<T> norm1;
  Conv2dLayer<T> conv2;
  BatchNormLayer<T> norm2;
  std::optional<Conv2dLayer<T>> shortcut_conv;
  std::optional<BatchNormLayer<T>> shortcut_norm;
};

/// Compact residual image classifier: 3x3 stem, stages of basic blocks,
/// global average pooling and a linear head.
template <typename T>
class SmallResNet final : public Model<T> {
 public:
  SmallResNet(ResNet2DConfig cfg, std::uint64_t seed);

  std::string architecture() const override { return "small_resnet"; }
  Shape sample_shape() const override { return {cfg_.in_channels, cfg_.input_size[0], cfg_.input_size[1]}; }
  std::size_t n_classes() const override { return cfg_.n_classes; }
  nlohmann::json config_json() const override { return cfg_.to_json(); }

  Var forward(Tape<T>& tape, Var input, Mode mode) override;
  /// Stem, then one group per block, then the head.
  std::vector<ParameterGroup<T>> parameter_groups() override;
  std::vector<NamedBuffer<T>> buffers() override;

  const ResNet2DConfig& config() const { return cfg_; }
  std::vector<BasicBlock<T>>& blocks() { return blocks_; }

 private:
  ResNet2DConfig cfg_;
  Conv2dLayer<T> stem_conv_;
  BatchNormLayer<T> stem_norm_;
  std::vector<BasicBlock<T>> blocks_;
  LinearLayer<T> head_;
};

template <typename T>
std::unique_ptr<SmallResNet<T>> build_small_resnet(const ResNet2DConfig& cfg, std::uint64_t seed);

}  // namespace infracls
