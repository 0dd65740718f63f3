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
#include <set>

#include "helpers.hpp"
#include "infracls/inception.hpp"
#include "infracls/ops.hpp"
#include "infracls/pipeline.hpp"
#include "infracls/random.hpp"
#include "infracls/synth.hpp"

namespace infracls {
namespace {

using Vec3 = std::vector<std::vector<std::vector<double>>>;  // [B][C][L]

Tensor<double> random_input(std::size_t batch, std::size_t channels, std::size_t length, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Tensor<double> t({batch, channels, length});
  for (double& v : t.data()) v = rng.normal();
  return t;
}

Vec3 to_vec(const Tensor<double>& t) {
  Vec3 out(t.dim(0), std::vector<std::vector<double>>(t.dim(1), std::vector<double>(t.dim(2))));
  for (std::size_t b = 0; b < t.dim(0); ++b)
    for (std::size_t c = 0; c < t.dim(1); ++c)
      for (std::size_t l = 0; l < t.dim(2); ++l) out[b][c][l] = t[(b * t.dim(1) + c) * t.dim(2) + l];
  return out;
}

Vec3 naive_conv(const Vec3& x, const Tensor<double>& w) {
  const std::size_t f_count = w.dim(0), c_count = w.dim(1), k = w.dim(2), length = x[0][0].size();
  const long pad = static_cast<long>(k / 2);
  Vec3 y(x.size(), std::vector<std::vector<double>>(f_count, std::vector<double>(length, 0.0)));
  for (std::size_t b = 0; b < x.size(); ++b)
    for (std::size_t f = 0; f < f_count; ++f)
      for (std::size_t l = 0; l < length; ++l) {
        double s = 0.0;
        for (std::size_t c = 0; c < c_count; ++c)
          for (std::size_t j = 0; j < k; ++j) {
            const long src = static_cast<long>(l + j) - pad;
            if (src >= 0 && src < static_cast<long>(length)) s += w[(f * c_count + c) * k + j] * x[b][c][src];
          }
        y[b][f][l] = s;
      }
  return y;
}

// Straight-line module: optional bottleneck, three convs, maxpool + 1x1 conv,
// concat, train-mode batchnorm with biased variance, relu.
Vec3 straight_line_module(const Vec3& x, InceptionModule<double>& m) {
  const std::size_t length = x[0][0].size();
  const Vec3 branch_in = m.bottleneck ? naive_conv(x, m.bottleneck->weight.value) : x;
  Vec3 pooled = x;
  for (std::size_t b = 0; b < x.size(); ++b)
    for (std::size_t c = 0; c < x[b].size(); ++c)
      for (std::size_t l = 0; l < length; ++l) {
        double best = -std::numeric_limits<double>::infinity();
        for (long d = -1; d <= 1; ++d) {
          const long src = static_cast<long>(l) + d;
          if (src >= 0 && src < static_cast<long>(length)) best = std::max(best, x[b][c][src]);
        }
        pooled[b][c][l] = best;
      }
  std::vector<Vec3> parts;
  for (auto& conv : m.convs) parts.push_back(naive_conv(branch_in, conv.weight.value));
  parts.push_back(naive_conv(pooled, m.pool_conv.weight.value));

  Vec3 cat(x.size());
  for (std::size_t b = 0; b < x.size(); ++b)
    for (const Vec3& p : parts)
      for (const auto& row : p[b]) cat[b].push_back(row);

  const std::size_t channels = cat[0].size();
  const double n = static_cast<double>(x.size() * length);
  for (std::size_t c = 0; c < channels; ++c) {
    double mean = 0.0;
    for (std::size_t b = 0; b < x.size(); ++b)
      for (double v : cat[b][c]) mean += v;
    mean /= n;
    double var = 0.0;
    for (std::size_t b = 0; b < x.size(); ++b)
      for (double v : cat[b][c]) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + 1e-5);
    for (std::size_t b = 0; b < x.size(); ++b)
      for (double& v : cat[b][c]) {
        v = m.norm.gamma.value[c] * (v - mean) * inv + m.norm.beta.value[c];
        v = std::max(v, 0.0);
      }
  }
  return cat;
}

Tensor<double> eval_logits(InceptionTime<double>& model, const Tensor<double>& x) {
  return model.logits(x, Mode::kEval);
}

TEST_SUITE("inception") {
  TEST_CASE("default configuration facts") {
    const InceptionConfig cfg;
    CHECK(cfg.feature_width() == 128);
    CHECK(cfg.residual_joins() == 2);
    auto model = build_inception_time<double>(cfg, 1);
    CHECK(model->head().weight.value.shape() == Shape{8, 128});
    auto groups = model->parameter_groups();
    REQUIRE(groups.size() == 7);
    CHECK(groups.back().label == "head");
    CHECK(groups.back().count() == 1032);
    std::size_t total = 0;
    std::set<const Parameter<double>*> seen;
    for (const auto& g : groups) {
      total += g.count();
      for (const auto* p : g.params) CHECK(seen.insert(p).second);
    }
    CHECK(total == model->parameter_count());
    CHECK(seen.size() == model->parameters().size());
    CHECK(model->parameter_count() == 405768);
  }

  TEST_CASE("depth 3 has exactly one residual join") {
    InceptionConfig cfg;
    cfg.depth = 3;
    CHECK(cfg.residual_joins() == 1);
    cfg.filters = 4;
    cfg.bottleneck_channels = 4;
    auto model = build_inception_time<double>(cfg, 2);
    std::size_t shortcut_params = 0;
    for (auto* p : model->parameters())
      if (p->name.find("shortcut") != std::string::npos) ++shortcut_params;
    CHECK(shortcut_params == 3);  // conv weight, gamma, beta
  }

  TEST_CASE("invalid configurations name the field") {
    InceptionConfig cfg;
    cfg.kernel_sizes = {39, 20, 9};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("kernel_sizes"), ConfigError);
    cfg = InceptionConfig{};
    cfg.kernel_sizes = {9, 19, 39};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("kernel_sizes"), ConfigError);
    cfg = InceptionConfig{};
    cfg.depth = 0;
    CHECK_THROWS_WITH_AS(build_inception_time<double>(cfg, 0), doctest::Contains("depth"), ConfigError);
  }

  TEST_CASE("config survives a json round trip") {
    InceptionConfig cfg;
    cfg.filters = 8;
    cfg.kernel_sizes = {11, 5, 3};
    const InceptionConfig back = InceptionConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
  }

  TEST_CASE("module matches a straight-line reimplementation") {
    InceptionConfig cfg;
    cfg.filters = 5;
    cfg.bottleneck_channels = 6;
    cfg.kernel_sizes = {9, 5, 3};
    for (const std::size_t in : {std::size_t{1}, std::size_t{7}}) {
      SplitMix64 rng(30 + in);
      InceptionModule<double> m("m", in, cfg, rng);
      for (std::size_t c = 0; c < cfg.feature_width(); ++c) {
        m.norm.gamma.value[c] = rng.uniform(0.5, 1.5);
        m.norm.beta.value[c] = rng.uniform(-0.5, 0.5);
      }
      CHECK(m.bottleneck.has_value() == (in > 1));
      const Tensor<double> x = random_input(3, in, 17, 40 + in);
      Tape<double> tape(false);
      const Tensor<double>& y = tape.value(m.forward(tape, tape.constant(x), Mode::kTrain));
      CHECK(y.shape() == Shape{3, 20, 17});
      const Vec3 expected = straight_line_module(to_vec(x), m);
      double worst = 0.0;
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t c = 0; c < 20; ++c)
          for (std::size_t l = 0; l < 17; ++l)
            worst = std::max(worst, std::abs(y[(b * 20 + c) * 17 + l] - expected[b][c][l]));
      CHECK(worst < 1e-10);
    }
  }

  TEST_CASE("zero input gives relu of beta") {
    InceptionConfig cfg;
    SplitMix64 rng(3);
    InceptionModule<double> m("m", 1, cfg, rng);
    for (std::size_t c = 0; c < 128; ++c) m.norm.beta.value[c] = (c % 2 == 0) ? 0.3 : -0.3;
    Tape<double> tape(false);
    const Tensor<double>& y = tape.value(m.forward(tape, tape.constant(Tensor<double>({2, 1, 94})), Mode::kEval));
    CHECK(y.shape() == Shape{2, 128, 94});
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 128; ++c)
        for (std::size_t l = 0; l < 94; ++l) CHECK(y[(b * 128 + c) * 94 + l] == ((c % 2 == 0) ? 0.3 : 0.0));
    CHECK_THROWS_AS(m.forward(tape, tape.constant(Tensor<double>({1, 2, 94})), Mode::kEval), ShapeError);
  }

  TEST_CASE("forward shapes, purity and input checks") {
    InceptionConfig cfg;
    cfg.filters = 8;
    cfg.bottleneck_channels = 8;
    auto model = build_inception_time<double>(cfg, 4);
    for (const std::size_t batch : {std::size_t{1}, std::size_t{5}}) {
      CHECK(eval_logits(*model, random_input(batch, 1, 94, batch)).shape() == Shape{batch, 8});
    }
    const Tensor<double> x = random_input(4, 1, 94, 5);
    CHECK(eval_logits(*model, x) == eval_logits(*model, x));
    try {
      eval_logits(*model, random_input(2, 1, 93, 6));
      FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
      CHECK(std::string(e.what()).find("94") != std::string::npos);
      CHECK(std::string(e.what()).find("93") != std::string::npos);
    }
  }

  TEST_CASE("default model maps a batch of 64 to finite logits") {
    auto model = build_inception_time<float>(InceptionConfig{}, 7);
    Tensor<float> x({64, 1, 94});
    SplitMix64 rng(8);
    for (float& v : x.data()) v = static_cast<float>(rng.normal());
    const Tensor<float> y = model->logits(x, Mode::kTrain);
    CHECK(y.shape() == Shape{64, 8});
    CHECK(all_finite(y));
  }

  TEST_CASE("identical signals give identical rows and shifts change logits") {
    InceptionConfig cfg;
    cfg.filters = 8;
    cfg.bottleneck_channels = 8;
    auto model = build_inception_time<double>(cfg, 9);
    Tensor<double> x = random_input(3, 1, 94, 10);
    for (std::size_t l = 0; l < 94; ++l) x[94 + l] = x[l];
    for (std::size_t l = 0; l < 94; ++l) x[188 + l] = x[(l + 93) % 94];  // circular shift by one
    const Tensor<double> y = eval_logits(*model, x);
    bool shifted_differs = false;
    for (std::size_t k = 0; k < 8; ++k) {
      CHECK(y[k] == y[8 + k]);
      shifted_differs |= y[k] != y[16 + k];
    }
    CHECK(shifted_differs);
  }

  TEST_CASE("random initialization gives non-degenerate predictions") {
    const SignalDataset data = generate(SynthConfig{104, 94, 77, 0.3});
    SignalSource<double> source(data);
    std::vector<std::size_t> all(100);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const Batch<double> batch = source.make_batch(all);
    // ReLU then global pooling shares a large positive component across
    // samples at init, so some seeds collapse to one class (about 1 in 5
    // with batch statistics); at least two of five must spread.
    int spread = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto model = build_inception_time<double>(InceptionConfig{}, seed);
      const Tensor<double> y = model->logits(batch.inputs, Mode::kTrain);
      std::set<std::size_t> classes;
      for (std::size_t b = 0; b < 100; ++b) {
        const double* row = y.raw() + b * 8;
        classes.insert(static_cast<std::size_t>(std::max_element(row, row + 8) - row));
      }
      spread += classes.size() > 1 ? 1 : 0;
    }
    CHECK(spread >= 2);
  }

  TEST_CASE("one backward pass reaches every parameter group") {
    InceptionConfig cfg;
    cfg.filters = 8;
    cfg.bottleneck_channels = 8;
    auto model = build_inception_time<double>(cfg, 11);
    Tape<double> tape;
    const Var logits = model->forward(tape, tape.constant(random_input(8, 1, 94, 12)), Mode::kTrain);
    const std::vector<int> labels{0, 1, 2, 3, 4, 5, 6, 7};
    tape.backward(softmax_cross_entropy(tape, logits, labels).loss);
    for (const auto& g : model->parameter_groups()) {
      double norm = 0.0;
      for (const auto* p : g.params)
        for (double v : p->grad.data()) norm += v * v;
      INFO(g.label);
      CHECK(norm > 0.0);
    }
  }
}

}  // namespace
}  // namespace infracls
