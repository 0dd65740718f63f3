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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "infracls/dataset.hpp"
#include "infracls/pipeline.hpp"
#include "infracls/random.hpp"
#include "infracls/synth.hpp"

namespace infracls {
namespace {

std::string row(int label, std::size_t length, double base) {
  std::ostringstream out;
  out << label;
  for (std::size_t i = 0; i < length; ++i) out << "," << base + 0.25 * static_cast<double>(i);
  return out.str();
}

SignalDataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset(in, "mem.csv");
}

template <typename T>
std::pair<double, double> moments(const Tensor<T>& t) {
  double s = 0.0;
  for (T v : t.data()) s += v;
  const double mean = s / static_cast<double>(t.size());
  double sq = 0.0;
  for (T v : t.data()) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(t.size()))};
}

// Reference permutation written from the documented algorithm.
std::vector<std::size_t> reference_permutation(std::size_t n, std::uint64_t seed) {
  std::uint64_t state = seed;
  auto next = [&state] {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) std::swap(p[i], p[next() % (i + 1)]);
  return p;
}

TEST_SUITE("dataset") {
  TEST_CASE("SplitMix64 reference outputs") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  }

  TEST_CASE("parse rows, headers and comments") {
    const std::string text = "label,v1,v2\n# comment\n" + row(0, 94, 1.0) + "\n\n" + row(1, 94, -2.0) + "\n" +
                             row(7, 94, 0.5) + "\n";
    const SignalDataset ds = parse(text);
    CHECK(ds.size() == 3);
    CHECK(ds.length == 94);
    CHECK(ds.labels == std::vector<int>{0, 1, 7});
    CHECK(ds.signal(1)[2] == -1.5);
    CHECK(ds.source == "mem.csv");
  }

  TEST_CASE("malformed files are rejected with line numbers") {
    CHECK_THROWS_WITH_AS(parse(""), doctest::Contains("no rows"), DataError);
    CHECK_THROWS_WITH_AS(parse("# only a comment\n"), doctest::Contains("no rows"), DataError);
    CHECK_THROWS_WITH_AS(parse(row(0, 94, 0.0) + "\n" + row(1, 93, 0.0) + "\n"),
                         doctest::Contains("mem.csv:2: expected 94 values, got 93"), DataError);
    CHECK_THROWS_WITH_AS(parse(row(8, 4, 0.0) + "\n"), doctest::Contains("mem.csv:1"), DataError);
    CHECK_THROWS_WITH_AS(parse(row(-1, 4, 0.0) + "\n"), doctest::Contains("mem.csv:1"), DataError);
    CHECK_THROWS_WITH_AS(parse("0,1,nan,3\n"), doctest::Contains("mem.csv:1"), DataError);
    CHECK_THROWS_WITH_AS(parse("0,1,inf,3\n"), doctest::Contains("mem.csv:1"), DataError);
    CHECK_THROWS_WITH_AS(parse("0,1,abc,3\n"), doctest::Contains("mem.csv:1"), DataError);
    CHECK_THROWS_WITH_AS(parse("1.5,1,2,3\n"), doctest::Contains("mem.csv:1"), DataError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv"), DataError);
  }

  TEST_CASE("write then load round-trips at nine significant digits") {
    const auto dir = testing::scratch_dir("dataset_roundtrip");
    const SignalDataset ds = generate(SynthConfig{80, 94, 3, 0.3});
    save_dataset(ds, dir / "a.csv");
    const SignalDataset once = load_dataset(dir / "a.csv");
    CHECK(once.labels == ds.labels);
    for (std::size_t i = 0; i < ds.signals.size(); ++i) {
      CHECK(std::abs(once.signals[i] - ds.signals[i]) <= 5e-9 * std::max(1e-3, std::abs(ds.signals[i])));
    }
    save_dataset(once, dir / "b.csv");
    const SignalDataset twice = load_dataset(dir / "b.csv");
    CHECK(twice.signals == once.signals);
    std::ifstream a(dir / "a.csv"), b(dir / "b.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }

  TEST_CASE("split sizes and determinism") {
    const SplitIndices s = split(2400, 0.2, 42);
    CHECK(s.train.size() == 1920);
    CHECK(s.valid.size() == 480);
    const SplitIndices again = split(2400, 0.2, 42);
    CHECK(s.train == again.train);
    CHECK(s.valid == again.valid);
    const SplitIndices other = split(2400, 0.2, 43);
    CHECK(other.valid != s.valid);
    CHECK(split(10, 0.2, 1).train != split(10, 0.2, 2).train);
    CHECK_THROWS_AS(split(10, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split(10, 1.0, 1), ConfigError);
  }

  TEST_CASE("split follows the documented generator bit for bit") {
    for (const std::uint64_t seed : {0ULL, 42ULL, 123456789ULL}) {
      const std::vector<std::size_t> perm = reference_permutation(2400, seed);
      const SplitIndices s = split(2400, 0.2, seed);
      CHECK(std::equal(s.valid.begin(), s.valid.end(), perm.begin()));
      CHECK(std::equal(s.train.begin(), s.train.end(), perm.begin() + 480));
    }
  }

  TEST_CASE("split is a partition for many sizes, fractions and seeds") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + rng.below(300);
      const double frac = rng.uniform(0.01, 0.99);
      const SplitIndices s = split(n, frac, rng.next());
      CHECK(s.valid.size() == static_cast<std::size_t>(std::llround(frac * static_cast<double>(n))));
      std::vector<std::size_t> all(s.train);
      all.insert(all.end(), s.valid.begin(), s.valid.end());
      std::sort(all.begin(), all.end());
      REQUIRE(all.size() == n);
      for (std::size_t i = 0; i < n; ++i) CHECK(all[i] == i);
    }
  }

  TEST_CASE("batch planning") {
    const SplitIndices s = split(2400, 0.2, 42);
    const auto train = plan_batches(s.train, 64, true, 7, 0);
    CHECK(train.size() == 30);
    for (const auto& b : train) CHECK(b.size() == 64);
    const auto valid = plan_batches(s.valid, 64, false, 7, 0);
    REQUIRE(valid.size() == 8);
    CHECK(valid.back().size() == 32);
    CHECK(valid.front().front() == s.valid.front());  // validation keeps its order
    CHECK(plan_batches(s.train, 64, true, 7, 3) == plan_batches(s.train, 64, true, 7, 3));
    CHECK(plan_batches(s.train, 64, true, 7, 3) != plan_batches(s.train, 64, true, 7, 4));
    std::vector<std::size_t> flat;
    for (const auto& b : train) flat.insert(flat.end(), b.begin(), b.end());
    std::sort(flat.begin(), flat.end());
    std::vector<std::size_t> sorted(s.train);
    std::sort(sorted.begin(), sorted.end());
    CHECK(flat == sorted);
  }

  TEST_CASE("gather shapes a batch as [B,1,L]") {
    const SignalDataset ds = parse(row(3, 5, 1.0) + "\n" + row(4, 5, 2.0) + "\n" + row(5, 5, 3.0) + "\n");
    const std::vector<std::size_t> idx{2, 0};
    const Batch<double> b = gather<double>(ds, idx);
    CHECK(b.inputs.shape() == Shape{2, 1, 5});
    CHECK(b.labels == std::vector<int>{5, 3});
    CHECK(b.inputs[0] == 3.0);
    CHECK(b.inputs[5] == 1.0);
  }

  TEST_CASE("standardize examples and properties") {
    Batch<double> hand{testing::make({2, 1, 2}, {1, 3, 5, 7}), {0, 1}};
    const Batch<double> out = standardize(hand);
    const double sd = std::sqrt(5.0);
    const std::vector<double> expected{-3 / sd, -1 / sd, 1 / sd, 3 / sd};
    for (std::size_t i = 0; i < 4; ++i) CHECK(out.inputs[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    CHECK(out.labels == hand.labels);

    const Batch<double> flat = standardize(Batch<double>{Tensor<double>({3, 1, 4}, 2.5), {0, 0, 0}});
    for (double v : flat.inputs.data()) CHECK(v == 0.0);

    const SignalDataset ds = generate(SynthConfig{160, 94, 5, 0.3});
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (const auto& b : batches<double>(ds, all, 64, true, 1, 0)) {
      const Batch<double> once = standardize(b);
      const auto [mean, sdev] = moments(once.inputs);
      CHECK(std::abs(mean) < 1e-6);
      CHECK(std::abs(sdev - 1.0) < 1e-6);
      const Batch<double> twice = standardize(once);
      for (std::size_t i = 0; i < once.inputs.size(); ++i) CHECK(std::abs(twice.inputs[i] - once.inputs[i]) < 1e-9);
    }
  }

  TEST_CASE("signal source emits standardized float batches") {
    const SignalDataset ds = generate(SynthConfig{128, 94, 6, 0.3});
    SignalSource<float> source(ds);
    CHECK(source.points_per_sample() == 94);
    std::vector<std::size_t> idx(ds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (const auto& plan : plan_batches(idx, 64, true, 3, 1)) {
      const Batch<float> b = source.make_batch(plan);
      const auto [mean, sdev] = moments(b.inputs);
      CHECK(std::abs(mean) < 1e-6);
      CHECK(std::abs(sdev - 1.0) < 1e-6);
    }
  }

  TEST_CASE("image source uses fixed channel statistics") {
    const SignalDataset ds = generate(SynthConfig{16, 94, 7, 0.3});
    const ImageSet images = build_scalogram_images(ds);
    CHECK(images.size() == 16);
    CHECK(images.height == 94);
    CHECK(images.width == 94);
    std::vector<std::size_t> idx(16);
    for (std::size_t i = 0; i < 16; ++i) idx[i] = i;
    const ChannelStats stats = channel_stats(images, idx);
    ImageSource<double> source(images, stats);
    CHECK(source.points_per_sample() == 94 * 94);
    const Batch<double> b = source.make_batch(idx);
    CHECK(b.inputs.shape() == Shape{16, 3, 94, 94});
    const std::size_t plane = 94 * 94;
    for (std::size_t c = 0; c < 3; ++c) {
      double s = 0.0;
      double sq = 0.0;
      for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t p = 0; p < plane; ++p) {
          const double v = b.inputs[(i * 3 + c) * plane + p];
          s += v;
          sq += v * v;
        }
      const double n = 16.0 * plane;
      CHECK(std::abs(s / n) < 1e-9);
      CHECK(std::abs(sq / n - 1.0) < 1e-9);
    }
    // Planar pixels agree with the rendered heatmap.
    const RgbImage img = render_heatmap(cwt(ds.signal(3), default_scales(94)));
    const std::vector<std::uint8_t> planar = planar_pixels(img);
    CHECK(std::equal(planar.begin(), planar.end(), images.pixels.begin() + 3 * images.sample_size()));
    CHECK(planar[plane + 5] == img.pixel(0, 5)[1]);
  }
}

}  // namespace
}  // namespace infracls
