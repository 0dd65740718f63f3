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
#include "infracls/wavelet.hpp"
#include "oracles.hpp"

namespace infracls {
namespace {

using Rgb = std::array<std::uint8_t, 3>;

std::vector<double> sinusoid(double f, std::size_t length) {
  std::vector<double> x(length);
  for (std::size_t t = 0; t < length; ++t) x[t] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(t));
  return x;
}

TEST_SUITE("wavelet") {
  TEST_CASE("morlet closed form and symmetry") {
    const std::complex<double> at0 = morlet(0.0, 6.0);
    CHECK(at0.real() == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-15));
    CHECK(at0.imag() == 0.0);
    CHECK(at0.real() == doctest::Approx(0.7511).epsilon(1e-4));
    for (double t = 0.05; t < 6.0; t += 0.37) CHECK(std::abs(morlet(t, 6.0)) == std::abs(morlet(-t, 6.0)));
    const double t = 0.8;
    const std::complex<double> expected =
        std::pow(std::numbers::pi, -0.25) * std::exp(std::complex<double>(0.0, 6.0 * t)) * std::exp(-t * t / 2.0);
    CHECK(std::abs(morlet(t, 6.0) - expected) < 1e-15);
  }

  TEST_CASE("morlet has unit energy") {
    CHECK(std::abs(testing::morlet_energy_quadrature(6.0) - 1.0) < 1e-3);
  }

  TEST_CASE("default scale grid") {
    const std::vector<double> s = default_scales(94);
    REQUIRE(s.size() == 94);
    const double ratio = s[1] / s[0];
    for (std::size_t k = 1; k < s.size(); ++k) CHECK(std::abs(s[k] / s[k - 1] - ratio) < 1e-12);
    CHECK(std::abs(scale_to_frequency(s.front(), 6.0) - 0.475) < 1e-9);
    CHECK(std::abs(scale_to_frequency(s.back(), 6.0) - 1.0 / 94.0) < 1e-9);
    CHECK(frequency_to_scale(scale_to_frequency(7.5, 6.0), 6.0) == doctest::Approx(7.5).epsilon(1e-14));
    WaveletConfig cfg;
    cfg.n_scales = 10;
    CHECK(default_scales(94, cfg).size() == 10);
    cfg.scale_min = 2.0;
    cfg.scale_max = 40.0;
    const std::vector<double> custom = default_scales(94, cfg);
    CHECK(custom.front() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(custom.back() == doctest::Approx(40.0).epsilon(1e-14));
  }

  TEST_CASE("configuration checks") {
    WaveletConfig cfg;
    cfg.omega0 = 4.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = WaveletConfig{};
    cfg.scale_min = 5.0;
    cfg.scale_max = 2.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(default_scales(1), ConfigError);
  }

  TEST_CASE("zero signal, linearity and non-finite input") {
    const std::vector<double> scales = default_scales(94);
    const Scalogram zero = cwt(std::vector<double>(94, 0.0), scales);
    for (double m : zero.magnitude) CHECK(m == 0.0);

    std::vector<double> x = sinusoid(0.13, 94);
    for (std::size_t t = 0; t < 94; ++t) x[t] += 0.3 * std::cos(0.05 * static_cast<double>(t * t));
    std::vector<double> scaled(x);
    for (double& v : scaled) v *= 2.5;
    const Scalogram a = cwt(x, scales);
    const Scalogram b = cwt(scaled, scales);
    CHECK(a.points() == 94 * 94);
    for (std::size_t i = 0; i < a.points(); ++i) {
      CHECK(a.magnitude[i] >= 0.0);
      CHECK(std::abs(b.magnitude[i] - 2.5 * a.magnitude[i]) <= 1e-12 * std::max(1.0, b.magnitude[i]));
    }
    for (std::size_t k = 1; k < a.n_scales; ++k) CHECK(a.frequencies[k] < a.frequencies[k - 1]);

    x[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(cwt(x, scales), DataError);
  }

  TEST_CASE("direct summation matches the definition") {
    const std::vector<double> x = sinusoid(0.07, 30);
    const std::vector<double> scales{1.5, 4.0, 9.0};
    const Scalogram sc = cwt(x, scales);
    for (std::size_t k = 0; k < scales.size(); ++k) {
      for (std::size_t tau = 0; tau < x.size(); tau += 7) {
        std::complex<double> w = 0.0;
        for (std::size_t t = 0; t < x.size(); ++t) {
          const double u = (static_cast<double>(t) - static_cast<double>(tau)) / scales[k];
          if (std::abs(u) < 8.0) w += x[t] * std::conj(morlet(u, 6.0));
        }
        CHECK(sc.at(k, tau) == doctest::Approx(std::abs(w) / std::sqrt(scales[k])).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("sinusoid ridge tracks the expected scale") {
    for (const double f : {0.05, 0.1, 0.2, 0.4}) {
      const testing::RidgeCheck r = testing::cwt_ridge_check(f);
      INFO("f=" << f << " hits " << r.hits << "/" << r.interior_columns);
      CHECK(r.interior_columns >= 10);
      CHECK(r.fraction() >= 0.9);
    }
  }

  TEST_CASE("impulse is localized in time at every scale") {
    const std::size_t t0 = 47;
    std::vector<double> x(94, 0.0);
    x[t0] = 1.0;
    const Scalogram sc = cwt(x, default_scales(94));
    for (std::size_t k = 0; k < sc.n_scales; ++k) {
      std::size_t arg = 0;
      for (std::size_t t = 1; t < 94; ++t)
        if (sc.at(k, t) > sc.at(k, arg)) arg = t;
      CHECK(std::abs(static_cast<long>(arg) - static_cast<long>(t0)) <= 1);
    }
  }

  TEST_CASE("windowed sinusoid energy concentrates near the ridge") {
    const double f = 0.1;
    std::vector<double> x = sinusoid(f, 94);
    for (std::size_t t = 0; t < 94; ++t) x[t] *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(t) / 93.0);
    const std::vector<double> scales = default_scales(94);
    const Scalogram sc = cwt(x, scales);
    const testing::RidgeCheck r = testing::cwt_ridge_check(f);
    double total = 0.0;
    double near = 0.0;
    for (std::size_t k = 0; k < sc.n_scales; ++k) {
      for (std::size_t t = 0; t < sc.length; ++t) {
        const double e = sc.at(k, t) * sc.at(k, t);
        total += e;
        if (std::abs(static_cast<long>(k) - static_cast<long>(r.expected_bin)) <= 3) near += e;
      }
    }
    CHECK(near / total >= 0.5);
  }

  TEST_CASE("viridis endpoints and monotone lookup") {
    CHECK(viridis(0.0) == Rgb{68, 1, 84});
    CHECK(viridis(1.0) == Rgb{253, 231, 37});
    CHECK(viridis(-3.0) == Rgb{68, 1, 84});
    CHECK(viridis(7.0) == Rgb{253, 231, 37});
    CHECK(viridis_table().size() == 256);
    double previous = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double p = colormap_position(i / 1000.0);
      CHECK(p >= previous);
      previous = p;
    }
    // Halfway between two table entries interpolates linearly.
    const auto& table = viridis_table();
    const Rgb mid = viridis(100.5 / 255.0);
    for (std::size_t c = 0; c < 3; ++c) {
      const double expected = 255.0 * 0.5 * (table[100][c] + table[101][c]);
      CHECK(std::abs(mid[c] - expected) <= 0.5 + 1e-9);
    }
  }

  TEST_CASE("heatmap rendering") {
    const std::vector<double> scales = default_scales(94);
    SUBCASE("constant scalogram is uniform colormap(0)") {
      const RgbImage img = render_heatmap(cwt(std::vector<double>(94, 0.0), scales));
      CHECK(img.height == 94);
      CHECK(img.width == 94);
      for (std::size_t r = 0; r < img.height; r += 13)
        for (std::size_t c = 0; c < img.width; c += 7) CHECK(img.pixel(r, c) == Rgb{68, 1, 84});
    }
    SUBCASE("invariant to positive rescaling and deterministic") {
      Scalogram sc = cwt(sinusoid(0.2, 94), scales);
      const RgbImage a = render_heatmap(sc);
      for (double& m : sc.magnitude) m *= 4.0;
      CHECK(render_heatmap(sc).pixels == a.pixels);
      CHECK(render_heatmap(sc).pixels == render_heatmap(sc).pixels);
    }
    SUBCASE("high frequencies render at the top, low at the bottom") {
      const RgbImage high = render_heatmap(cwt(sinusoid(0.4, 94), scales));
      const RgbImage low = render_heatmap(cwt(sinusoid(0.03, 94), scales));
      auto brightness = [](const RgbImage& img, std::size_t row) {
        const auto p = img.pixel(row, 47);
        return int(p[0]) + int(p[1]) + int(p[2]);
      };
      CHECK(brightness(high, 2) > brightness(high, 91));
      CHECK(brightness(low, 91) > brightness(low, 2));
    }
  }

  TEST_CASE("png round trip") {
    const auto dir = testing::scratch_dir("wavelet_png");
    const RgbImage img = render_heatmap(cwt(sinusoid(0.1, 94), default_scales(94)));
    write_png(dir / "x.png", img);
    const RgbImage back = read_png(dir / "x.png");
    CHECK(back.height == 94);
    CHECK(back.width == 94);
    CHECK(back.pixels == img.pixels);
    CHECK_THROWS_AS(read_png(dir / "missing.png"), DataError);
  }
}

}  // namespace
}  // namespace infracls
