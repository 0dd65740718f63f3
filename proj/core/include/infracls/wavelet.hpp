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

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace infracls {

struct WaveletConfig {
  double omega0 = 6.0;
  /// Number of scales; 0 means one per signal sample.
  std::size_t n_scales = 0;
  /// Scale range in samples; both 0 selects the default frequency grid.
  double scale_min = 0.0;
  double scale_max = 0.0;

  void validate() const;
};

/// Morlet mother wavelet pi^(-1/4) exp(i omega0 t) exp(-t^2 / 2).
std::complex<double> morlet(double t, double omega0);

/// Highest frequency of the default grid, in cycles/sample (0.95 of Nyquist).
inline constexpr double kTopFrequency = 0.5 * 0.95;

/// Geometrically spaced, ascending scales. By default their frequencies
/// omega0 / (2 pi s) run from kTopFrequency down to 1/length, with one scale
/// per sample.
std::vector<double> default_scales(std::size_t length, const WaveletConfig& cfg = {});

/// Frequency in cycles/sample seen by a Morlet wavelet at \p scale.
double scale_to_frequency(double scale, double omega0);
double frequency_to_scale(double frequency, double omega0);

struct Scalogram {
  std::size_t n_scales = 0;
  std::size_t length = 0;
  std::vector<double> magnitude;    ///< row-major [n_scales, length]
  std::vector<double> scales;       ///< ascending
  std::vector<double> frequencies;  ///< descending, cycles/sample

  double at(std::size_t scale_index, std::size_t t) const { return magnitude[scale_index * length + t]; }
  std::size_t points() const { return magnitude.size(); }
};

/// Direct-summation CWT, W(s,tau) = s^(-1/2) sum_t x[t] conj(psi((t - tau)/s)),
/// with the wavelet truncated where |(t - tau)/s| >= 8. Throws DataError on
/// non-finite samples.
Scalogram cwt(std::span<const double> signal, std::span<const double> scales, const WaveletConfig& cfg = {});

struct RgbImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  ///< row-major, interleaved RGB

  std::array<std::uint8_t, 3> pixel(std::size_t row, std::size_t col) const {
    const std::size_t i = 3 * (row * width + col);
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
};

/// 256-entry viridis table, RGB in [0, 1].
const std::array<std::array<double, 3>, 256>& viridis_table();

/// Position of a normalized value in the colormap table, in [0, 255].
double colormap_position(double normalized);

/// Viridis color of a value in [0, 1], linearly interpolated between table
/// entries and rounded to 8 bits. Values outside [0, 1] are clamped.
std::array<std::uint8_t, 3> viridis(double normalized);

/// Per-image min-max normalized heatmap. Image row r holds scale r, so the
/// smallest scale (highest frequency) is the top row and the largest scale
/// (lowest frequency) the bottom row. A constant scalogram maps to viridis(0).
RgbImage render_heatmap(const Scalogram& sc);

void write_png(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_png(const std::filesystem::path& path);

}  // namespace infracls
