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
#include <string_view>
#include <vector>

#include "infracls/dataset.hpp"

namespace infracls {

struct SynthConfig {
  std::size_t n = 2400;
  std::size_t length = 94;
  std::uint64_t seed = 42;
  /// Additive white noise standard deviation relative to the clean RMS.
  double noise = 0.3;
};

/// Short name of a waveform family, e.g. "n_wave".
std::string_view class_name(int cls);

/// One randomized draw of class \p cls from the stream seeded with
/// \p stream_seed.
std::vector<double> synth_signal(int cls, std::size_t length, std::uint64_t stream_seed, double noise);

/// Noise-free member of a family with every jittered parameter at the
/// middle of its range.
std::vector<double> class_prototype(int cls, std::size_t length);

/// n/8 signals per class; signal i has label i mod 8 and is drawn from the
/// stream mix_seed(seed, i). Throws ConfigError unless n is a positive
/// multiple of 8.
SignalDataset generate(const SynthConfig& cfg);

}  // namespace infracls
