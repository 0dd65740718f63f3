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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "infracls/tensor.hpp"

namespace infracls {

inline constexpr std::size_t kNumClasses = 8;

/// N labeled signals of one common length.
struct SignalDataset {
  std::size_t length = 0;
  std::vector<double> signals;  ///< row-major [N, length]
  std::vector<int> labels;
  std::string source;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const double> signal(std::size_t i) const { return {signals.data() + i * length, length}; }
};

/// Text format, one signal per line: "<label>,<v1>,...,<vL>". Lines starting
/// with '#' and blank lines are skipped; a first row whose first field is not
/// numeric is a header. Throws DataError naming the line on ragged rows,
/// non-finite values or labels outside [0, 8).
SignalDataset load_dataset(const std::filesystem::path& path);
SignalDataset parse_dataset(std::istream& in, const std::string& source);

/// Writes values with 9 significant digits.
void save_dataset(const SignalDataset& ds, const std::filesystem::path& path);
void write_dataset(const SignalDataset& ds, std::ostream& out);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::uint64_t seed = 0;
};

/// Fisher-Yates permutation of 0..n-1 driven by SplitMix64(seed): for
/// i = n-1 down to 1, swap positions i and next() mod (i+1). The first
/// round(valid_frac * n) entries form the validation set, the rest the
/// training set, both in permutation order.
SplitIndices split(std::size_t n, double valid_frac, std::uint64_t seed);

/// The same permutation applied to an index list.
std::vector<std::size_t> shuffled(std::span<const std::size_t> indices, std::uint64_t seed);

/// Index lists of consecutive batches; the last may be smaller. With
/// shuffle the order is permuted by shuffled(indices, mix_seed(seed, epoch)).
std::vector<std::vector<std::size_t>> plan_batches(std::span<const std::size_t> indices, std::size_t batch_size,
                                                   bool shuffle, std::uint64_t seed, std::size_t epoch);

template <typename T>
struct Batch {
  Tensor<T> inputs;  ///< [B, C, ...]
  std::vector<int> labels;
};

/// Rows of \p ds as a [B,1,L] batch.
template <typename T>
Batch<T> gather(const SignalDataset& ds, std::span<const std::size_t> indices);

template <typename T>
std::vector<Batch<T>> batches(const SignalDataset& ds, std::span<const std::size_t> indices,
                              std::size_t batch_size, bool shuffle, std::uint64_t seed, std::size_t epoch);

/// One scalar mean and population standard deviation over every value in
/// the batch; output (x - mean) / std, or zeros when std < 1e-12.
template <typename T>
Batch<T> standardize(Batch<T> batch);

}  // namespace infracls
