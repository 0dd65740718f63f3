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

#include "infracls/pipeline.hpp"
#include "infracls/synth.hpp"
#include "infracls/wavelet.hpp"

namespace infracls {
namespace {

void BM_CwtSignal(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const std::vector<double> x = synth_signal(2, length, 9, 0.3);
  const std::vector<double> scales = default_scales(length);
  for (auto _ : state) benchmark::DoNotOptimize(cwt(x, scales).magnitude.data());
}
BENCHMARK(BM_CwtSignal)->Arg(94)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_RenderHeatmap(benchmark::State& state) {
  const std::vector<double> x = synth_signal(5, 94, 9, 0.3);
  const Scalogram sc = cwt(x, default_scales(94));
  for (auto _ : state) benchmark::DoNotOptimize(render_heatmap(sc).pixels.data());
}
BENCHMARK(BM_RenderHeatmap)->Unit(benchmark::kMicrosecond);

void BM_ScalogramImages(benchmark::State& state) {
  const SignalDataset ds = generate(SynthConfig{static_cast<std::size_t>(state.range(0)), 94, 42, 0.3});
  for (auto _ : state) benchmark::DoNotOptimize(build_scalogram_images(ds).pixels.data());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScalogramImages)->Arg(240)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace infracls
