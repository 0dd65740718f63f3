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

#include "infracls/layers.hpp"

#include <cmath>

namespace infracls {

template <typename T>
Tensor<T> fan_in_uniform(Shape shape, std::size_t fan_in, SplitMix64& rng) {
  Tensor<T> out(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (T& v : out.data()) v = static_cast<T>(rng.uniform(-bound, bound));
  return out;
}

template <typename T>
Conv1dLayer<T>::Conv1dLayer(const std::string& name, std::size_t in_channels, std::size_t out_channels,
                            std::size_t kernel, bool with_bias, SplitMix64& rng)
    : weight(name + ".weight",
             fan_in_uniform<T>({out_channels, in_channels, kernel}, in_channels * kernel, rng)) {
  if (with_bias) bias.emplace(name + ".bias", fan_in_uniform<T>({out_channels}, in_channels * kernel, rng));
}

template <typename T>
Var Conv1dLayer<T>::forward(Tape<T>& tape, Var x) {
  std::optional<Var> b;
  if (bias) b = tape.param(*bias);
  return conv1d(tape, x, tape.param(weight), b);
}

template <typename T>
void Conv1dLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  out.push_back(&weight);
  if (bias) out.push_back(&*bias);
}

template <typename T>
Conv2dLayer<T>::Conv2dLayer(const std::string& name, std::size_t in_channels, std::size_t out_channels,
                            std::size_t kernel, std::size_t stride_, bool with_bias, SplitMix64& rng)
    : weight(name + ".weight", fan_in_uniform<T>({out_channels, in_channels, kernel, kernel},
                                                 in_channels * kernel * kernel, rng)),
      stride(stride_) {
  if (with_bias) {
    bias.emplace(name + ".bias", fan_in_uniform<T>({out_channels}, in_channels * kernel * kernel, rng));
  }
}

template <typename T>
Var Conv2dLayer<T>::forward(Tape<T>& tape, Var x) {
  std::optional<Var> b;
  if (bias) b = tape.param(*bias);
  return conv2d(tape, x, tape.param(weight), b, stride);
}

template <typename T>
void Conv2dLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  out.push_back(&weight);
  if (bias) out.push_back(&*bias);
}

template <typename T>
BatchNormLayer<T>::BatchNormLayer(const std::string& name_, std::size_t channels)
    : gamma(name_ + ".gamma", Tensor<T>({channels}, T{1})),
      beta(name_ + ".beta", Tensor<T>({channels}, T{0})),
      running_mean({channels}, T{0}),
      running_var({channels}, T{1}),
      name(name_) {}

template <typename T>
Var BatchNormLayer<T>::forward(Tape<T>& tape, Var x, Mode mode) {
  return batchnorm(tape, x, tape.param(gamma), tape.param(beta), running_mean, running_var, mode, options);
}

template <typename T>
void BatchNormLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

template <typename T>
void BatchNormLayer<T>::collect_buffers(std::vector<NamedBuffer<T>>& out) {
  out.push_back({name + ".running_mean", &running_mean});
  out.push_back({name + ".running_var", &running_var});
}

template <typename T>
LinearLayer<T>::LinearLayer(const std::string& name, std::size_t in_features, std::size_t out_features,
                            SplitMix64& rng)
    : weight(name + ".weight", fan_in_uniform<T>({out_features, in_features}, in_features, rng)),
      bias(name + ".bias", fan_in_uniform<T>({out_features}, in_features, rng)) {}

template <typename T>
Var LinearLayer<T>::forward(Tape<T>& tape, Var x) {
  return linear(tape, x, tape.param(weight), tape.param(bias));
}

template <typename T>
void LinearLayer<T>::collect(std::vector<Parameter<T>*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

template Tensor<float> fan_in_uniform<float>(Shape, std::size_t, SplitMix64&);
template Tensor<double> fan_in_uniform<double>(Shape, std::size_t, SplitMix64&);
template class Conv1dLayer<float>;
template class Conv1dLayer<double>;
template class Conv2dLayer<float>;
template class Conv2dLayer<double>;
template class BatchNormLayer<float>;
template class BatchNormLayer<double>;
template class LinearLayer<float>;
template class LinearLayer<double>;

}  // namespace infracls
