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
#include <cstdint>
#include <span>
#include <vector>

#include "infracls/dataset.hpp"
#include "infracls/wavelet.hpp"

namespace infracls {

/// Labeled samples that can be assembled into normalized network batches.
template <typename T>
class SampleSource {
 public:
  virtual ~SampleSource() = default;

  virtual std::size_t size() const = 0;
  /// Per-sample tensor shape, channel axis first.
  virtual Shape sample_shape() const = 0;
  virtual int label(std::size_t i) const = 0;
  /// Batch of the given samples, normalized the way the network expects.
  virtual Batch<T> make_batch(std::span<const std::size_t> indices) const = 0;

  /// Data points per sample seen by the network (extent after the channel axis).
  std::size_t points_per_sample() const;
};

/// Direct approach: [B,1,L] signal batches, each standardized by its own
/// scalar mean and standard deviation.
template <typename T>
class SignalSource final : public SampleSource<T> {
 public:
  explicit SignalSource(const SignalDataset& ds) : ds_(&ds) {}

  std::size_t size() const override { return ds_->size(); }
  Shape sample_shape() const override { return {1, ds_->length}; }
  int label(std::size_t i) const override { return ds_->labels[i]; }
  Batch<T> make_batch(std::span<const std::size_t> indices) const override;

 private:
  const SignalDataset* ds_;
};

/// Rendered scalogram images, planar 8-bit RGB [N,3,H,W].
struct ImageSet {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<int> labels;

  static constexpr std::size_t kChannels = 3;
  std::size_t size() const noexcept { return labels.size(); }
  std::size_t sample_size() const noexcept { return kChannels * height * width; }
};

/// CWT + viridis heatmap for every signal (wavelet approach).
ImageSet build_scalogram_images(const SignalDataset& ds, const WaveletConfig& cfg = {});

/// Planar [3,H,W] bytes of one rendered heatmap.
std::vector<std::uint8_t> planar_pixels(const RgbImage& image);

struct ChannelStats {
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> std{1.0, 1.0, 1.0};
};

/// Per-channel mean and population std of pixel/255 over \p indices.
ChannelStats channel_stats(const ImageSet& images, std::span<const std::size_t> indices);

/// Wavelet approach: [B,3,H,W] batches with (pixel/255 - mean_c) / std_c.
template <typename T>
class ImageSource final : public SampleSource<T> {
 public:
  ImageSource(const ImageSet& images, ChannelStats stats) : images_(&images), stats_(stats) {}

  std::size_t size() const override { return images_->size(); }
  Shape sample_shape() const override { return {ImageSet::kChannels, images_->height, images_->width}; }
  int label(std::size_t i) const override { return images_->labels[i]; }
  Batch<T> make_batch(std::span<const std::size_t> indices) const override;

  const ChannelStats& stats() const { return stats_; }

 private:
  const ImageSet* images_;
  ChannelStats stats_;
};

}  // namespace infracls
