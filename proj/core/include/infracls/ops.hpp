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
#include <span>
#include <vector>

#include "infracls/tape.hpp"

namespace infracls {

enum class Mode { kTrain, kEval };

/// Same-padded 1D cross-correlation. x: [B,C,L], kernel: [F,C,K] with K odd,
/// bias: [F]. Output [B,F,L].
template <typename T>
Var conv1d(Tape<T>& tape, Var x, Var kernel, std::optional<Var> bias = std::nullopt);

/// Same-padded 2D cross-correlation with stride 1 or 2. x: [B,C,H,W],
/// kernel: [F,C,Kh,Kw] with odd extents. Output [B,F,ceil(H/s),ceil(W/s)].
template <typename T>
Var conv2d(Tape<T>& tape, Var x, Var kernel, std::optional<Var> bias = std::nullopt,
           std::size_t stride = 1);

struct BatchNormOptions {
  double eps = 1e-5;
  double momentum = 0.1;
};

/// Per-channel normalization over batch and spatial dims of x: [B,C,...].
/// Train mode uses biased batch statistics and updates the running
/// statistics in place; eval mode uses the running statistics.
template <typename T>
Var batchnorm(Tape<T>& tape, Var x, Var gamma, Var beta, Tensor<T>& running_mean,
              Tensor<T>& running_var, Mode mode, BatchNormOptions options = {});

template <typename T>
Var relu(Tape<T>& tape, Var x);

/// Same-padded windowed max over the last axis of x: [B,C,L], stride 1.
/// Padded positions hold -inf and never win.
template <typename T>
Var maxpool1d(Tape<T>& tape, Var x, std::size_t kernel = 3);

/// Mean over all axes after the channel axis: [B,C,...] -> [B,C].
template <typename T>
Var global_avg_pool(Tape<T>& tape, Var x);

/// x: [B,N], weight: [M,N], bias: [M] -> [B,M].
template <typename T>
Var linear(Tape<T>& tape, Var x, Var weight, std::optional<Var> bias = std::nullopt);

template <typename T>
Var add(Tape<T>& tape, Var a, Var b);

/// Elementwise product of equal-shaped tensors.
template <typename T>
Var mul(Tape<T>& tape, Var a, Var b);

template <typename T>
Var scale(Tape<T>& tape, Var x, T factor);

/// Sum of all elements, shape [1].
template <typename T>
Var sum(Tape<T>& tape, Var x);

/// Concatenates [B,C_i,...] tensors along the channel axis.
template <typename T>
Var concat_channels(Tape<T>& tape, const std::vector<Var>& parts);

template <typename T>
struct CrossEntropyResult {
  Var loss;         ///< mean negative log-likelihood, shape [1]
  Tensor<T> probs;  ///< softmax rows, shape [B,K]
};

/// Max-subtracted softmax with mean negative log-likelihood over the batch.
template <typename T>
CrossEntropyResult<T> softmax_cross_entropy(Tape<T>& tape, Var logits, std::span<const int> labels);

}  // namespace infracls
