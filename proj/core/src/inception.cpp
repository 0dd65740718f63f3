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

#include "infracls/inception.hpp"

#include <string>

namespace infracls {
namespace {

void fail(const std::string& field, const std::string& why) {
  throw ConfigError("InceptionConfig." + field + ": " + why);
}

}  // namespace

void InceptionConfig::validate() const {
  if (in_channels == 0) fail("in_channels", "must be positive");
  if (n_classes < 2) fail("n_classes", "must be at least 2");
  if (depth == 0) fail("depth", "must be positive");
  if (filters == 0) fail("filters", "must be positive");
  if (bottleneck_channels == 0) fail("bottleneck_channels", "must be positive");
  if (residual_every == 0) fail("residual_every", "must be positive");
  if (input_length == 0) fail("input_length", "must be positive");
  if (kernel_sizes.empty()) fail("kernel_sizes", "must not be empty");
  for (std::size_t i = 0; i < kernel_sizes.size(); ++i) {
    if (kernel_sizes[i] % 2 == 0) fail("kernel_sizes", "kernel " + std::to_string(kernel_sizes[i]) + " is not odd");
    if (i > 0 && kernel_sizes[i] >= kernel_sizes[i - 1]) fail("kernel_sizes", "must be strictly decreasing");
  }
}

nlohmann::json InceptionConfig::to_json() const {
  return {{"in_channels", in_channels},
          {"n_classes", n_classes},
          {"depth", depth},
          {"filters", filters},
          {"bottleneck_channels", bottleneck_channels},
          {"kernel_sizes", kernel_sizes},
          {"residual_every", residual_every},
          {"input_length", input_length}};
}

InceptionConfig InceptionConfig::from_json(const nlohmann::json& j) {
  InceptionConfig cfg;
  cfg.in_channels = j.at("in_channels").get<std::size_t>();
  cfg.n_classes = j.at("n_classes").get<std::size_t>();
  cfg.depth = j.at("depth").get<std::size_t>();
  cfg.filters = j.at("filters").get<std::size_t>();
  cfg.bottleneck_channels = j.at("bottleneck_channels").get<std::size_t>();
  cfg.kernel_sizes = j.at("kernel_sizes").get<std::vector<std::size_t>>();
  cfg.residual_every = j.at("residual_every").get<std::size_t>();
  cfg.input_length = j.at("input_length").get<std::size_t>();
  return cfg;
}

template <typename T>
InceptionModule<T>::InceptionModule(const std::string& name, std::size_t in, const InceptionConfig& cfg,
                                    SplitMix64& rng)
    : in_channels(in),
      pool_conv(name + ".pool_conv", in, cfg.filters, 1, false, rng),
      norm(name + ".norm", cfg.feature_width()) {
  std::size_t branch_in = in;
  if (in > 1) {
    bottleneck.emplace(name + ".bottleneck", in, cfg.bottleneck_channels, 1, false, rng);
    branch_in = cfg.bottleneck_channels;
  }
  for (std::size_t i = 0; i < cfg.kernel_sizes.size(); ++i) {
    convs.emplace_back(name + ".conv" + std::to_string(i), branch_in, cfg.filters, cfg.kernel_sizes[i], false, rng);
  }
}

template <typename T>
Var InceptionModule<T>::forward(Tape<T>& tape, Var x, Mode mode) {
  const std::size_t channels = tape.value(x).dim(1);
  if (channels != in_channels) {
    throw ShapeError("inception module expects " + std::to_string(in_channels) + " input channels, got " +
                     to_string(tape.value(x).shape()));
  }
  const Var branch_in = bottleneck ? bottleneck->forward(tape, x) : x;
  std::vector<Var> branches;
  for (auto& conv : convs) branches.push_back(conv.forward(tape, branch_in));
  branches.push_back(pool_conv.forward(tape, maxpool1d(tape, x, 3)));
  return relu(tape, norm.forward(tape, concat_channels(tape, branches), mode));
}

template <typename T>
void InceptionModule<T>::collect(std::vector<Parameter<T>*>& out) {
  if (bottleneck) bottleneck->collect(out);
  for (auto& conv : convs) conv.collect(out);
  pool_conv.collect(out);
  norm.collect(out);
}

template <typename T>
void InceptionModule<T>::collect_buffers(std::vector<NamedBuffer<T>>& out) {
  norm.collect_buffers(out);
}

template <typename T>
InceptionShortcut<T>::InceptionShortcut(const std::string& name, std::size_t in, std::size_t out, SplitMix64& rng)
    : conv(name + ".conv", in, out, 1, false, rng), norm(name + ".norm", out) {}

namespace {

const InceptionConfig& validated(const InceptionConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

template <typename T>
InceptionTime<T>::InceptionTime(InceptionConfig cfg, std::uint64_t seed)
    : cfg_(validated(cfg)),
      head_([&] {
        SplitMix64 rng(mix_seed(seed, 1000));
        return LinearLayer<T>("head", cfg_.feature_width(), cfg_.n_classes, rng);
      }()) {
  const std::size_t width = cfg_.feature_width();
  modules_.reserve(cfg_.depth);
  std::size_t residual_in = cfg_.in_channels;
  for (std::size_t d = 0; d < cfg_.depth; ++d) {
    SplitMix64 rng(mix_seed(seed, d));
    modules_.emplace_back("block" + std::to_string(d), d == 0 ? cfg_.in_channels : width, cfg_, rng);
    if (joins_after(d)) {
      SplitMix64 srng(mix_seed(seed, 500 + d));
      shortcuts_.emplace_back("shortcut" + std::to_string(shortcuts_.size()), residual_in, width, srng);
      residual_in = width;
    }
  }
}

template <typename T>
Var InceptionTime<T>::forward(Tape<T>& tape, Var input, Mode mode) {
  this->check_input(tape.value(input));
  Var x = input;
  Var residual = input;
  std::size_t join = 0;
  for (std::size_t d = 0; d < modules_.size(); ++d) {
    x = modules_[d].forward(tape, x, mode);
    if (joins_after(d)) {
      InceptionShortcut<T>& s = shortcuts_[join++];
      const Var shortcut = s.norm.forward(tape, s.conv.forward(tape, residual), mode);
      x = relu(tape, add(tape, x, shortcut));
      residual = x;
    }
  }
  pooled_ = global_avg_pool(tape, x);
  return head_.forward(tape, pooled_);
}

template <typename T>
std::vector<ParameterGroup<T>> InceptionTime<T>::parameter_groups() {
  std::vector<ParameterGroup<T>> groups;
  std::size_t join = 0;
  for (std::size_t d = 0; d < modules_.size(); ++d) {
    ParameterGroup<T> g{"block" + std::to_string(d), {}};
    modules_[d].collect(g.params);
    if (joins_after(d)) {
      shortcuts_[join].conv.collect(g.params);
      shortcuts_[join].norm.collect(g.params);
      ++join;
    }
    groups.push_back(std::move(g));
  }
  ParameterGroup<T> head{"head", {}};
  head_.collect(head.params);
  groups.push_back(std::move(head));
  return groups;
}

template <typename T>
std::vector<NamedBuffer<T>> InceptionTime<T>::buffers() {
  std::vector<NamedBuffer<T>> out;
  std::size_t join = 0;
  for (std::size_t d = 0; d < modules_.size(); ++d) {
    modules_[d].collect_buffers(out);
    if (joins_after(d)) shortcuts_[join++].norm.collect_buffers(out);
  }
  return out;
}

template <typename T>
std::unique_ptr<InceptionTime<T>> build_inception_time(const InceptionConfig& cfg, std::uint64_t seed) {
  return std::make_unique<InceptionTime<T>>(cfg, seed);
}

template class InceptionModule<float>;
template class InceptionModule<double>;
template struct InceptionShortcut<float>;
template struct InceptionShortcut<double>;
template class InceptionTime<float>;
template class InceptionTime<double>;
template std::unique_ptr<InceptionTime<float>> build_inception_time<float>(const InceptionConfig&, std::uint64_t);
template std::unique_ptr<InceptionTime<double>> build_inception_time<double>(const InceptionConfig&, std::uint64_t);

}  // namespace infracls
