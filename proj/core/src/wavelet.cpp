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

#include "infracls/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "infracls/errors.hpp"

namespace infracls {
namespace {

// |psi| < exp(-32) beyond this many scales from the center.
constexpr double kSupport = 8.0;

}  // namespace

void WaveletConfig::validate() const {
  if (!(omega0 >= 5.0)) throw ConfigError("WaveletConfig.omega0: must be >= 5, got " + std::to_string(omega0));
  const bool custom = scale_min != 0.0 || scale_max != 0.0;
  if (custom && !(scale_min > 0.0 && scale_min < scale_max)) {
    throw ConfigError("WaveletConfig.scale_min/scale_max: need 0 < scale_min < scale_max");
  }
}

std::complex<double> morlet(double t, double omega0) {
  const double envelope = std::exp(-0.5 * t * t) / std::sqrt(std::sqrt(std::numbers::pi));
  return {envelope * std::cos(omega0 * t), envelope * std::sin(omega0 * t)};
}

double scale_to_frequency(double scale, double omega0) { return omega0 / (2.0 * std::numbers::pi * scale); }

double frequency_to_scale(double frequency, double omega0) {
  return omega0 / (2.0 * std::numbers::pi * frequency);
}

std::vector<double> default_scales(std::size_t length, const WaveletConfig& cfg) {
  cfg.validate();
  if (length < 2) throw ConfigError("default_scales: signal length must be at least 2");
  const std::size_t count = cfg.n_scales == 0 ? length : cfg.n_scales;
  double lo = cfg.scale_min;
  double hi = cfg.scale_max;
  if (lo == 0.0 && hi == 0.0) {
    lo = frequency_to_scale(kTopFrequency, cfg.omega0);
    hi = frequency_to_scale(1.0 / static_cast<double>(length), cfg.omega0);
  }
  std::vector<double> scales(count);
  if (count == 1) {
    scales[0] = lo;
    return scales;
  }
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) scales[k] = std::exp(log_lo + step * static_cast<double>(k));
  scales.front() = lo;
  scales.back() = hi;
  return scales;
}

Scalogram cwt(std::span<const double> signal, std::span<const double> scales, const WaveletConfig& cfg) {
  cfg.validate();
  if (signal.size() < 2) throw ConfigError("cwt: signal length must be at least 2");
  if (scales.empty()) throw ConfigError("cwt: need at least one scale");
  for (std::size_t t = 0; t < signal.size(); ++t) {
    if (!std::isfinite(signal[t])) throw DataError("cwt: non-finite sample at index " + std::to_string(t));
  }
  const std::size_t length = signal.size();
  Scalogram sc;
  sc.n_scales = scales.size();
  sc.length = length;
  sc.scales.assign(scales.begin(), scales.end());
  sc.magnitude.assign(sc.n_scales * length, 0.0);
  for (double s : scales) {
    if (!(s > 0.0)) throw ConfigError("cwt: scales must be positive");
    sc.frequencies.push_back(scale_to_frequency(s, cfg.omega0));
  }

  std::vector<std::complex<double>> kernel;
  for (std::size_t k = 0; k < sc.n_scales; ++k) {
    const double s = scales[k];
    // Offsets d = t - tau with |d / s| < 8, clipped to the signal length.
    const auto reach = static_cast<long>(std::min(std::ceil(kSupport * s), static_cast<double>(length)));
    kernel.assign(static_cast<std::size_t>(2 * reach + 1), {0.0, 0.0});
    const double norm = 1.0 / std::sqrt(s);
    for (long d = -reach; d <= reach; ++d) {
      const double u = static_cast<double>(d) / s;
      if (std::abs(u) >= kSupport) continue;
      kernel[static_cast<std::size_t>(d + reach)] = std::conj(morlet(u, cfg.omega0)) * norm;
    }
    for (std::size_t tau = 0; tau < length; ++tau) {
      const long lo = std::max(0L, static_cast<long>(tau) - reach);
      const long hi = std::min(static_cast<long>(length) - 1, static_cast<long>(tau) + reach);
      std::complex<double> acc{0.0, 0.0};
      for (long t = lo; t <= hi; ++t) {
        acc += signal[static_cast<std::size_t>(t)] * kernel[static_cast<std::size_t>(t - static_cast<long>(tau) + reach)];
      }
      sc.magnitude[k * length + tau] = std::abs(acc);
    }
  }
  return sc;
}

double colormap_position(double normalized) { return std::clamp(normalized, 0.0, 1.0) * 255.0; }

std::array<std::uint8_t, 3> viridis(double normalized) {
  const auto& table = viridis_table();
  const double pos = colormap_position(normalized);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min<std::size_t>(lo + 1, 255);
  const double frac = pos - static_cast<double>(lo);
  std::array<std::uint8_t, 3> rgb{};
  for (std::size_t c = 0; c < 3; ++c) {
    const double v = table[lo][c] + frac * (table[hi][c] - table[lo][c]);
    rgb[c] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
  return rgb;
}

RgbImage render_heatmap(const Scalogram& sc) {
  for (double m : sc.magnitude) {
    if (!std::isfinite(m)) throw DataError("render_heatmap: non-finite magnitude");
  }
  RgbImage image;
  image.height = sc.n_scales;
  image.width = sc.length;
  image.pixels.resize(3 * image.height * image.width);
  const auto [mn_it, mx_it] = std::minmax_element(sc.magnitude.begin(), sc.magnitude.end());
  const double mn = *mn_it;
  const double range = *mx_it - mn;
  for (std::size_t i = 0; i < sc.magnitude.size(); ++i) {
    const double v = range > 0.0 ? (sc.magnitude[i] - mn) / range : 0.0;
    const auto rgb = viridis(v);
    std::copy(rgb.begin(), rgb.end(), image.pixels.begin() + static_cast<std::ptrdiff_t>(3 * i));
  }
  return image;
}

}  // namespace infracls
