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

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "infracls/tape.hpp"

namespace infracls::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  ///< "param[index]" of the largest error
  std::size_t checked = 0;
};

using LossFn = std::function<Var(Tape<double>&)>;

/// Compares tape gradients of every element of \p params against central
/// differences with step h. Relative error uses max(|a|, |b|, 1e-8).
GradCheckResult check_gradients(const std::vector<Parameter<double>*>& params, const LossFn& loss, double h = 1e-5);

struct GradCheckCase {
  std::string name;
  std::function<GradCheckResult()> run;
};

/// Every differentiable op plus miniature versions of both networks.
std::vector<GradCheckCase> gradient_cases();

}  // namespace infracls::testing
