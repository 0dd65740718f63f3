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

// One optimizer step (forward, backward, Adam) on a batch of 64.

#include <benchmark/benchmark.h>

#include "infracls/inception.hpp"
#include "infracls/ops.hpp"
#include "infracls/optim.hpp"
#include "infracls/random.hpp"
#include "infracls/resnet.hpp"

namespace infracls {
namespace {

void run_steps(benchmark::State& state, Model<float>& model, const Shape& input_shape) {
  SplitMix64 rng(5);
  Tensor<float> x(input_shape);
  for (float& v : x.data()) v = static_cast<float>(rng.normal());
  std::vector<int> labels(input_shape[0]);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 8);
  Adam<float> adam(model.parameter_groups(), 0.01);
  const std::vector<double> lrs(adam.group_count(), 1e-4);
  for (auto _ : state) {
    for (Parameter<float>* p : model.parameters()) p->zero_grad();
    Tape<float> tape;
    const Var logits = model.forward(tape, tape.constant(x), Mode::kTrain);
    tape.backward(softmax_cross_entropy(tape, logits, labels).loss);
    adam.step(lrs);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(input_shape[0]));
}

void BM_InceptionTimeStep(benchmark::State& state) {
  auto model = build_inception_time<float>(InceptionConfig{}, 0);
  run_steps(state, *model, {64, 1, 94});
}
BENCHMARK(BM_InceptionTimeStep)->Unit(benchmark::kMillisecond);

void BM_SmallResNetStep(benchmark::State& state) {
  auto model = build_small_resnet<float>(ResNet2DConfig{}, 0);
  run_steps(state, *model, {64, 3, 94, 94});
}
BENCHMARK(BM_SmallResNetStep)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
}  // namespace infracls
