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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "helpers.hpp"
#include "infracls/optim.hpp"
#include "infracls/train.hpp"

namespace infracls {
namespace {

double cosine_oracle(double a, double b, double pct) { return b + (a - b) * (1.0 + std::cos(std::numbers::pi * pct)) / 2.0; }

TEST_SUITE("optim") {
  TEST_CASE("one-cycle anchors") {
    for (const std::size_t total : {std::size_t{8}, std::size_t{600}, std::size_t{990}}) {
      const OneCycleSchedule s{2e-2, total};
      CHECK(s.peak_step() == total / 4);
      CHECK(std::abs(one_cycle_lr(s, 0) - 2e-2 / 25.0) <= 1e-12);
      CHECK(one_cycle_lr(s, s.peak_step()) == 2e-2);
      CHECK(std::abs(one_cycle_lr(s, total) - 2e-2 / 1e5) <= 1e-12);
      CHECK_THROWS_AS(one_cycle_lr(s, total + 1), std::out_of_range);
    }
  }

  TEST_CASE("one-cycle follows the cosine formula and is monotone per segment") {
    const OneCycleSchedule s{1e-2, 600};
    const std::size_t peak = s.peak_step();
    double previous = one_cycle_lr(s, 0);
    for (std::size_t step = 1; step <= 600; ++step) {
      const double lr = one_cycle_lr(s, step);
      const double expected = step <= peak
                                  ? cosine_oracle(1e-2 / 25.0, 1e-2, double(step) / double(peak))
                                  : cosine_oracle(1e-2, 1e-2 / 1e5, double(step - peak) / double(600 - peak));
      CHECK(lr == doctest::Approx(expected).epsilon(1e-12));
      if (step <= peak) {
        CHECK(lr >= previous);
      } else {
        CHECK(lr <= previous);
      }
      // Continuity: no jump larger than the steepest cosine slope allows.
      CHECK(std::abs(lr - previous) <= 1e-2 * std::numbers::pi / double(peak));
      previous = lr;
    }
  }

  TEST_CASE("discriminative rates") {
    const std::vector<double> seven = discriminative_lrs(1e-6, 1e-2, 7);
    REQUIRE(seven.size() == 7);
    const double ratio = std::pow(1e4, 1.0 / 6.0);
    for (std::size_t g = 1; g < 7; ++g) {
      CHECK(std::abs(seven[g] / seven[g - 1] - ratio) <= 1e-12 * ratio);
      CHECK(seven[g] >= seven[g - 1]);
    }
    CHECK(discriminative_lrs(1e-6, 1e-2, 2) == std::vector<double>{1e-6, 1e-2});
    CHECK(discriminative_lrs(1e-6, 1e-2, 1) == std::vector<double>{1e-2});
    for (double v : discriminative_lrs(3e-4, 3e-4, 5)) CHECK(v == 3e-4);
  }

  TEST_CASE("learning-rate policies") {
    const LrPolicy fixed = LrPolicy::fixed(1e-3);
    CHECK(fixed.group_rates(3, 17, 100) == std::vector<double>(3, 1e-3));
    const LrPolicy cycle = LrPolicy::one_cycle(2e-2);
    CHECK(cycle.group_rates(2, 25, 100) == std::vector<double>(2, 2e-2));
    const LrPolicy slice = LrPolicy::slice(1e-6, 1e-2);
    const std::vector<double> at_peak = slice.group_rates(7, 25, 100);
    CHECK(at_peak.front() == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(at_peak.back() == doctest::Approx(1e-2).epsilon(1e-12));
    const std::vector<double> at_start = slice.group_rates(7, 0, 100);
    for (std::size_t g = 0; g < 7; ++g) CHECK(at_start[g] == doctest::Approx(at_peak[g] / 25.0).epsilon(1e-12));
  }

  TEST_CASE("adam: zero gradient leaves parameters alone") {
    Parameter<double> p("p", testing::make({3}, {1.0, -2.0, 0.5}));
    Parameter<double>* ptrs[] = {&p};
    AdamState<double> state;
    adam_step<double>(ptrs, state, 0.1, 0.0);
    CHECK(testing::values(p.value) == std::vector<double>{1.0, -2.0, 0.5});
    CHECK(state.step == 1);
    CHECK(state.first_moment.front().shape() == p.value.shape());

    // Decoupled weight decay alone scales by (1 - lr * wd).
    adam_step<double>(ptrs, state, 0.1, 0.01);
    CHECK(p.value[1] == doctest::Approx(-2.0 * (1.0 - 0.1 * 0.01)).epsilon(1e-15));
  }

  TEST_CASE("adam: first step moves by about lr in the gradient's direction") {
    Parameter<double> p("p", testing::make({2}, {1.0, 1.0}));
    p.grad[0] = 3.0;
    p.grad[1] = -0.5;
    Parameter<double>* ptrs[] = {&p};
    AdamState<double> state;
    adam_step<double>(ptrs, state, 1e-3, 0.0);
    CHECK(p.value[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-7));
    CHECK(p.value[1] == doctest::Approx(1.0 + 1e-3).epsilon(1e-6));
  }

  TEST_CASE("adam matches a scalar reference over several steps") {
    Parameter<double> p("p", testing::make({1}, {0.7}));
    Parameter<double>* ptrs[] = {&p};
    AdamState<double> state;
    double ref = 0.7, m = 0.0, v = 0.0;
    const double lr = 0.05, wd = 0.01, b1 = 0.9, b2 = 0.99, eps = 1e-5;
    for (int t = 1; t <= 10; ++t) {
      const double g = std::sin(3.0 * t) + ref;
      p.grad[0] = g;
      adam_step<double>(ptrs, state, lr, wd);
      ref *= 1.0 - lr * wd;
      m = b1 * m + (1 - b1) * g;
      v = b2 * v + (1 - b2) * g * g;
      const double mhat = m / (1 - std::pow(b1, t));
      const double vhat = v / (1 - std::pow(b2, t));
      ref -= lr * mhat / (std::sqrt(vhat) + eps);
      CHECK(p.value[0] == doctest::Approx(ref).epsilon(1e-12));
    }
  }

  TEST_CASE("adam minimizes a quadratic") {
    Parameter<double> p("p", testing::make({1}, {1.0}));
    Parameter<double>* ptrs[] = {&p};
    AdamState<double> state;
    for (int i = 0; i < 200; ++i) {
      p.grad[0] = p.value[0];  // d/dp of p^2/2
      adam_step<double>(ptrs, state, 0.1, 0.0);
    }
    CHECK(std::abs(p.value[0]) < 1e-2);
  }

  TEST_CASE("adam rejects non-finite gradients by name") {
    Parameter<double> a("block0.conv.weight", testing::make({2}, {1.0, 2.0}));
    Parameter<double> b("head.bias", testing::make({1}, {1.0}));
    b.grad[0] = std::numeric_limits<double>::quiet_NaN();
    Parameter<double>* ptrs[] = {&a, &b};
    AdamState<double> state;
    CHECK_THROWS_WITH_AS(adam_step<double>(ptrs, state, 0.1, 0.0), doctest::Contains("head.bias"), NumericError);
    CHECK(a.value[0] == 1.0);  // nothing was updated
  }

  TEST_CASE("grouped adam applies one rate per group") {
    Parameter<double> a("a", testing::make({1}, {1.0}));
    Parameter<double> b("b", testing::make({1}, {1.0}));
    Adam<double> opt({{"g0", {&a}}, {"g1", {&b}}}, 0.0);
    a.grad[0] = 1.0;
    b.grad[0] = 1.0;
    const std::vector<double> rates{1e-4, 1e-2};
    opt.step(rates);
    CHECK(opt.steps() == 1);
    CHECK(1.0 - a.value[0] == doctest::Approx(1e-4).epsilon(1e-4));
    CHECK(1.0 - b.value[0] == doctest::Approx(1e-2).epsilon(1e-4));
    const std::vector<double> wrong{1e-3};
    CHECK_THROWS(opt.step(wrong));
  }
}

}  // namespace
}  // namespace infracls
