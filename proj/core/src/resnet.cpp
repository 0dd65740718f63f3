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

#include "infracls/resnet.hpp"

#include <string>

namespace infracls {
namespace {

void fail(const std::string& field, const std::string& why) {
  throw ConfigError("ResNet2DConfig." + field + ": " + why);
}

const ResNet2DConfig& validated(const ResNet2DConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

void ResNet2DConfig::validate() const {
  if (in_channels == 0) fail("in_channels", "must be positive");
  if (n_classes < 2) fail("n_classes", "must be at least 2");
  if (stage_widths.empty()) fail("stage_widths", "must not be empty");
  for (std::size_t w : stage_widths) {
    if (w == 0) fail("stage_widths", "widths must be positive");
  }
  if (blocks_per_stage == 0) fail("blocks_per_stage", "must be positive");
  if (input_size[0] == 0 || input_size[1] == 0) fail("input_size", "must be positive");
}

std::vector<std::size_t> ResNet2DConfig::spatial_trace() const {
  std::vector<std::size_t> trace{input_size[0]};
  std::size_t h = input_size[0];
  for (std::size_t s = 0; s < stage_widths.size(); ++s) {
    if (s > 0) h = (h + 1) / 2;
    trace.push_back(h);
  }
  return trace;
}

nlohmann::json ResNet2DConfig::to_json() const {
  return {{"in_channels", in_channels},
          {"n_classes", n_classes},
          {"stage_widths", stage_widths},
          {"blocks_per_stage", blocks_per_stage},
          {"input_size", input_size}};
}

ResNet2DConfig ResNet2DConfig::from_json(const nlohmann::json& j) {
  ResNet2DConfig cfg;
  cfg.in_channels = j.at("in_channels").get<std::size_t>();
  cfg.n_classes = j.at("n_classes").get<std::size_t>();
  cfg.stage_widths = j.at("stage_widths").get<std::vector<std::size_t>>();
  cfg.blocks_per_stage = j.at("blocks_per_stage").get<std::size_t>();
  cfg.input_size = j.at("input_size").get<std::array<std::size_t, 2>>();
  return cfg;
}

template <typename T>
BasicBlock<T>::BasicBlock(const std::string& name, std::size_t in, std::size_t out, std::size_t stride,
                          SplitMix64& rng)
    : conv1(name + ".conv1", in, out, 3, stride, false, rng),
      norm1(name + ".norm1", out),
      conv2(name + ".conv2", out, out, 3, 1, false, rng),
      norm2(name + ".norm2", out) {
  if (stride != 1 || in != out) {
    shortcut_conv.emplace(name + ".shortcut_conv", in, out, 1, stride, false, rng);
    shortcut_norm.emplace(name + ".shortcut_norm", out);
  }
}

template <typename T>
Var BasicBlock<T>::forward(Tape<T>& tape, Var x, Mode mode) {
  Var h = relu(tape, norm1.forward(tape, conv1.forward(tape, x), mode));
  h = norm2.forward(tape, conv2.forward(tape, h), mode);
  const Var shortcut = shortcut_conv ? shortcut_norm->forward(tape, shortcut_conv->forward(tape, x), mode) : x;
  return relu(tape, add(tape, h, shortcut));
}

template <typename T>
void BasicBlock<T>::collect(std::vector<Parameter<T>*>& out) {
  conv1.collect(out);
  norm1.collect(out);
  conv2.collect(out);
  norm2.collect(out);
  if (shortcut_conv) {
    shortcut_conv->collect(out);
    shortcut_norm->collect(out);
  }
}

template <typename T>
void BasicBlock<T>::collect_buffers(std::vector<NamedBuffer<T>>& out) {
  norm1.collect_buffers(out);
  norm2.collect_buffers(out);
  if (shortcut_norm) shortcut_norm->collect_buffers(out);
}

template <typename T>
SmallResNet<T>::SmallResNet(ResNet2DConfig cfg, std::uint64_t seed)
    : cfg_(validated(cfg)),
      stem_conv_([&] {
        SplitMix64 rng(mix_seed(seed, 0));
        return Conv2dLayer<T>("stem.conv", cfg_.in_channels, cfg_.stage_widths.front(), 3, 1, false, rng);
      }()),
      stem_norm_("stem.norm", cfg_.stage_widths.front()),
      head_([&] {
        SplitMix64 rng(mix_seed(seed, 1000));
        return LinearLayer<T>("head", cfg_.stage_widths.back(), cfg_.n_classes, rng);
      }()) {
  std::size_t in = cfg_.stage_widths.front();
  std::size_t index = 0;
  for (std::size_t s = 0; s < cfg_.stage_widths.size(); ++s) {
    const std::size_t width = cfg_.stage_widths[s];
    for (std::size_t b = 0; b < cfg_.blocks_per_stage; ++b) {
      SplitMix64 rng(mix_seed(seed, 1 + index++));
      const std::size_t stride = (s > 0 && b == 0) ? 2 : 1;
      blocks_.emplace_back("stage" + std::to_string(s) + ".block" + std::to_string(b), in, width, stride, rng);
      in = width;
    }
  }
}

template <typename T>
Var SmallResNet<T>::forward(Tape<T>& tape, Var input, Mode mode) {
  this->check_input(tape.value(input));
  Var x = relu(tape, stem_norm_.forward(tape, stem_conv_.forward(tape, input), mode));
  for (auto& block : blocks_) x = block.forward(tape, x, mode);
  return head_.forward(tape, global_avg_pool(tape, x));
}

template <typename T>
std::vector<ParameterGroup<T>> SmallResNet<T>::parameter_groups() {
  std::vector<ParameterGroup<T>> groups;
  ParameterGroup<T> stem{"stem", {}};
  stem_conv_.collect(stem.params);
  stem_norm_.collect(stem.params);
  groups.push_back(std::move(stem));
  std::size_t index = 0;
  for (auto& block : blocks_) {
    const std::size_t s = index / cfg_.blocks_per_stage;
    const std::size_t b = index % cfg_.blocks_per_stage;
    ParameterGroup<T> g{"stage" + std::to_string(s) + ".block" + std::to_string(b), {}};
    block.collect(g.params);
    groups.push_back(std::move(g));
    ++index;
  }
  ParameterGroup<T> head{"head", {}};
  head_.collect(head.params);
  groups.push_back(std::move(head));
  return groups;
}

template <typename T>
std::vector<NamedBuffer<T>> SmallResNet<T>::buffers() {
  std::vector<NamedBuffer<T>> out;
  stem_norm_.collect_buffers(out);
  for (auto& block : blocks_) block.collect_buffers(out);
  return out;
}

template <typename T>
std::unique_ptr<SmallResNet<T>> build_small_resnet(const ResNet2DConfig& cfg, std::uint64_t seed) {
  return std::make_unique<SmallResNet<T>>(cfg, seed);
}

template class BasicBlock<float>;
template class BasicBlock<double>;
template class SmallResNet<float>;
template class SmallResNet<double>;
template std::unique_ptr<SmallResNet<float>> build_small_resnet<float>(const ResNet2DConfig&, std::uint64_t);
template std::unique_ptr<SmallResNet<double>> build_small_resnet<double>(const ResNet2DConfig&, std::uint64_t);

}  // namespace infracls
