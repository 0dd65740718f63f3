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

#include "infracls/optim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace infracls {
namespace {

double cosine_blend(double from, double to, double pct) {
  return from + (to - from) * 0.5 * (1.0 - std::cos(std::numbers::pi * pct));
}

}  // namespace

std::size_t OneCycleSchedule::peak_step() const {
  return static_cast<std::size_t>(std::floor(pct_start * static_cast<double>(total_steps)));
}

double one_cycle_lr(const OneCycleSchedule& sched, std::size_t step) {
  if (step > sched.total_steps) {
    throw std::out_of_range("one_cycle_lr: step " + std::to_string(step) + " outside [0," +
                            std::to_string(sched.total_steps) + "]");
  }
  const double start = sched.lr_max / sched.div;
  const double end = sched.lr_max / sched.div_final;
  const std::size_t peak = sched.peak_step();
  if (step == sched.total_steps && peak < sched.total_steps) return end;
  if (step < peak) {
    return cosine_blend(start, sched.lr_max, static_cast<double>(step) / static_cast<double>(peak));
  }
  if (step == peak) return sched.lr_max;
  const double pct = static_cast<double>(step - peak) / static_cast<double>(sched.total_steps - peak);
  return cosine_blend(sched.lr_max, end, pct);
}

std::vector<double> discriminative_lrs(double lr_min, double lr_max, std::size_t n_groups) {
  if (n_groups == 0) throw std::invalid_argument("discriminative_lrs: need at least one group");
  if (n_groups == 1) return {lr_max};
  std::vector<double> out(n_groups);
  const double ratio = lr_max / lr_min;
  for (std::size_t g = 0; g < n_groups; ++g) {
    out[g] = lr_min * std::pow(ratio, static_cast<double>(g) / static_cast<double>(n_groups - 1));
  }
  out.front() = lr_min;
  out.back() = lr_max;
  return out;
}

namespace {

template <typename T>
void check_gradients(std::span<Parameter<T>* const> params) {
  for (const Parameter<T>* p : params) {
    if (p->grad.shape() != p->value.shape()) {
      throw ShapeError("adam: gradient of " + p->name + " has shape " + to_string(p->grad.shape()) + ", expected " +
                       to_string(p->value.shape()));
    }
    if (!all_finite(p->grad)) throw NumericError("non-finite gradient in parameter " + p->name);
  }
}

template <typename T>
void ensure_moments(std::span<Parameter<T>* const> params, AdamState<T>& state) {
  if (state.first_moment.size() == params.size()) return;
  state.first_moment.clear();
  state.second_moment.clear();
  for (const Parameter<T>* p : params) {
    state.first_moment.emplace_back(p->value.shape());
    state.second_moment.emplace_back(p->value.shape());
  }
}

template <typename T>
void update(Parameter<T>& p, Tensor<T>& m, Tensor<T>& v, double lr, double weight_decay, std::size_t step,
            const AdamOptions& o) {
  const double bc1 = 1.0 - std::pow(o.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(o.beta2, static_cast<double>(step));
  const double decay = 1.0 - lr * weight_decay;
  T* w = p.value.raw();
  const T* g = p.grad.raw();
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const double gi = g[i];
    const double mi = o.beta1 * m[i] + (1.0 - o.beta1) * gi;
    const double vi = o.beta2 * v[i] + (1.0 - o.beta2) * gi * gi;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    const double m_hat = mi / bc1;
    const double v_hat = vi / bc2;
    w[i] = static_cast<T>(w[i] * decay - lr * m_hat / (std::sqrt(v_hat) + o.eps));
  }
}

}  // namespace

template <typename T>
void adam_step(std::span<Parameter<T>* const> params, AdamState<T>& state, double lr, double weight_decay,
               const AdamOptions& options) {
  check_gradients(params);
  ensure_moments(params, state);
  ++state.step;
  for (std::size_t i = 0; i < params.size(); ++i) {
    update(*params[i], state.first_moment[i], state.second_moment[i], lr, weight_decay, state.step, options);
  }
}

template <typename T>
Adam<T>::Adam(std::vector<ParameterGroup<T>> groups, double weight_decay, AdamOptions options)
    : groups_(std::move(groups)), weight_decay_(weight_decay), options_(options) {
  for (const auto& g : groups_) flat_.insert(flat_.end(), g.params.begin(), g.params.end());
  ensure_moments<T>(flat_, state_);
}

template <typename T>
void Adam<T>::step(std::span<const double> group_lrs) {
  if (group_lrs.size() != groups_.size()) {
    throw std::invalid_argument("Adam::step: " + std::to_string(group_lrs.size()) + " rates for " +
                                std::to_string(groups_.size()) + " groups");
  }
  check_gradients<T>(flat_);
  ++state_.step;
  std::size_t k = 0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (Parameter<T>* p : groups_[g].params) {
      update(*p, state_.first_moment[k], state_.second_moment[k], group_lrs[g], weight_decay_, state_.step,
             options_);
      ++k;
    }
  }
}

template void adam_step<float>(std::span<Parameter<float>* const>, AdamState<float>&, double, double,
                               const AdamOptions&);
template void adam_step<double>(std::span<Parameter<double>* const>, AdamState<double>&, double, double,
                                const AdamOptions&);
template class Adam<float>;
template class Adam<double>;

}  // namespace infracls
