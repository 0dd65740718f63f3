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

#include "infracls/pipeline.hpp"

#include <cmath>

namespace infracls {

template <typename T>
std::size_t SampleSource<T>::points_per_sample() const {
  const Shape s = sample_shape();
  return element_count(Shape(s.begin() + 1, s.end()));
}

template <typename T>
Batch<T> SignalSource<T>::make_batch(std::span<const std::size_t> indices) const {
  return standardize(gather<T>(*ds_, indices));
}

std::vector<std::uint8_t> planar_pixels(const RgbImage& image) {
  const std::size_t plane = image.height * image.width;
  std::vector<std::uint8_t> out(3 * plane);
  for (std::size_t p = 0; p < plane; ++p) {
    for (std::size_t c = 0; c < 3; ++c) out[c * plane + p] = image.pixels[3 * p + c];
  }
  return out;
}

ImageSet build_scalogram_images(const SignalDataset& ds, const WaveletConfig& cfg) {
  const std::vector<double> scales = default_scales(ds.length, cfg);
  ImageSet images;
  images.height = scales.size();
  images.width = ds.length;
  images.pixels.reserve(ds.size() * images.sample_size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto planar = planar_pixels(render_heatmap(cwt(ds.signal(i), scales, cfg)));
    images.pixels.insert(images.pixels.end(), planar.begin(), planar.end());
    images.labels.push_back(ds.labels[i]);
  }
  return images;
}

ChannelStats channel_stats(const ImageSet& images, std::span<const std::size_t> indices) {
  ChannelStats stats;
  const std::size_t plane = images.height * images.width;
  for (std::size_t c = 0; c < ImageSet::kChannels; ++c) {
    double sum = 0.0;
    double sq = 0.0;
    for (std::size_t i : indices) {
      const std::uint8_t* p = images.pixels.data() + i * images.sample_size() + c * plane;
      for (std::size_t k = 0; k < plane; ++k) {
        const double v = p[k] / 255.0;
        sum += v;
        sq += v * v;
      }
    }
    const double n = static_cast<double>(indices.size() * plane);
    stats.mean[c] = n > 0 ? sum / n : 0.0;
    const double var = n > 0 ? sq / n - stats.mean[c] * stats.mean[c] : 1.0;
    stats.std[c] = var > 1e-12 ? std::sqrt(var) : 1.0;
  }
  return stats;
}

template <typename T>
Batch<T> ImageSource<T>::make_batch(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw ShapeError("make_batch: empty batch");
  const std::size_t plane = images_->height * images_->width;
  Batch<T> batch{Tensor<T>(Shape{indices.size(), ImageSet::kChannels, images_->height, images_->width}), {}};
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const std::size_t i = indices[b];
    if (i >= images_->size()) throw std::out_of_range("make_batch: index " + std::to_string(i));
    const std::uint8_t* src = images_->pixels.data() + i * images_->sample_size();
    T* dst = batch.inputs.raw() + b * images_->sample_size();
    for (std::size_t c = 0; c < ImageSet::kChannels; ++c) {
      const double mean = stats_.mean[c];
      const double inv = 1.0 / stats_.std[c];
      for (std::size_t k = 0; k < plane; ++k) {
        dst[c * plane + k] = static_cast<T>((src[c * plane + k] / 255.0 - mean) * inv);
      }
    }
    batch.labels.push_back(images_->labels[i]);
  }
  return batch;
}

template class SampleSource<float>;
template class SampleSource<double>;
template class SignalSource<float>;
template class SignalSource<double>;
template class ImageSource<float>;
template class ImageSource<double>;

}  // namespace infracls
