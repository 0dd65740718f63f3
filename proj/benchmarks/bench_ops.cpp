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

#include <benchmark/benchmark.h>

#include "infracls/ops.hpp"
#include "infracls/random.hpp"

namespace infracls {
namespace {

Tensor<float> noise(Shape shape, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Tensor<float> t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

// Args: in channels, out channels, kernel. Batch 64 at length 94.
void BM_Conv1dForwardBackward(benchmark::State& state) {
  const auto in = static_cast<std::size_t>(state.range(0));
  const auto out = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  Parameter<float> x("x", noise({64, in, 94}, 1));
  Parameter<float> w("w", noise({out, in, k}, 2));
  for (auto _ : state) {
    Tape<float> tape;
    const Var y = conv1d(tape, tape.param(x), tape.param(w));
    tape.backward(sum(tape, y));
    benchmark::DoNotOptimize(w.grad.raw());
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_Conv1dForwardBackward)->Args({1, 32, 39})->Args({32, 32, 39})->Args({128, 32, 1})->Unit(benchmark::kMillisecond);

// Args: in channels, out channels, spatial size, stride. Batch 64, 3x3 kernel.
void BM_Conv2dForwardBackward(benchmark::State& state) {
  const auto in = static_cast<std::size_t>(state.range(0));
  const auto out = static_cast<std::size_t>(state.range(1));
  const auto hw = static_cast<std::size_t>(state.range(2));
  const auto stride = static_cast<std::size_t>(state.range(3));
  Parameter<float> x("x", noise({64, in, hw, hw}, 3));
  Parameter<float> w("w", noise({out, in, 3, 3}, 4));
  for (auto _ : state) {
    Tape<float> tape;
    const Var y = conv2d(tape, tape.param(x), tape.param(w), std::nullopt, stride);
    tape.backward(sum(tape, y));
    benchmark::DoNotOptimize(w.grad.raw());
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_Conv2dForwardBackward)
    ->Args({3, 16, 94, 1})
    ->Args({16, 16, 94, 1})
    ->Args({16, 32, 94, 2})
    ->Args({64, 64, 24, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace infracls
