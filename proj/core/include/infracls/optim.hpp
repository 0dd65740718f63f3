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
#include <span>
#include <vector>

#include "infracls/model.hpp"

namespace infracls {

/// Cosine warm-up from lr_max/div to lr_max over the first pct_start of the
/// steps, then cosine annealing to lr_max/div_final at total_steps.
struct OneCycleSchedule {
  double lr_max = 1e-3;
  std::size_t total_steps = 1;
  double pct_start = 0.25;
  double div = 25.0;
  double div_final = 1e5;

  std::size_t peak_step() const;
};

/// Throws std::out_of_range unless 0 <= step <= total_steps.
double one_cycle_lr(const OneCycleSchedule& sched, std::size_t step);

/// Geometric rates lr_min * (lr_max/lr_min)^(g/(G-1)) for groups g = 0..G-1
/// ordered from the input; G == 1 yields {lr_max}.
std::vector<double> discriminative_lrs(double lr_min, double lr_max, std::size_t n_groups);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.99;
  double eps = 1e-5;
};

template <typename T>
struct AdamState {
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;
  std::size_t step = 0;
};

/// One Adam step with decoupled weight decay over \p params using their
/// accumulated gradients. Checks every gradient before touching any
/// parameter; throws NumericError naming the first non-finite one.
template <typename T>
void adam_step(std::span<Parameter<T>* const> params, AdamState<T>& state, double lr, double weight_decay,
               const AdamOptions& options = {});

/// Adam over parameter groups, one learning rate per group, sharing one step
/// counter for bias correction.
template <typename T>
class Adam {
 public:
  Adam(std::vector<ParameterGroup<T>> groups, double weight_decay, AdamOptions options = {});

  void step(std::span<const double> group_lrs);
  std::size_t steps() const noexcept { return state_.step; }
  std::size_t group_count() const noexcept { return groups_.size(); }

 private:
  std::vector<ParameterGroup<T>> groups_;
  std::vector<Parameter<T>*> flat_;
  AdamState<T> state_;
  double weight_decay_;
  AdamOptions options_;
};

}  // namespace infracls
