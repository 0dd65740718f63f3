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

#include "infracls/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "infracls/random.hpp"

namespace infracls {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && !field.empty();
}

bool parse_int(std::string_view field, long& out) {
  field = trim(field);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && !field.empty();
}

[[noreturn]] void fail_line(const std::string& source, std::size_t line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SignalDataset parse_dataset(std::istream& in, const std::string& source) {
  SignalDataset ds;
  ds.source = source;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split_fields(view);
    double probe;
    if (first_row && !parse_double(fields.front(), probe)) {
      first_row = false;
      continue;  // header
    }
    first_row = false;

    long label;
    if (!parse_int(fields.front(), label)) fail_line(source, line_no, "label is not an integer");
    if (label < 0 || label >= static_cast<long>(kNumClasses)) {
      fail_line(source, line_no, "label " + std::to_string(label) + " outside [0," + std::to_string(kNumClasses) + ")");
    }
    const std::size_t count = fields.size() - 1;
    if (ds.length == 0) {
      if (count == 0) fail_line(source, line_no, "row has no values");
      ds.length = count;
    } else if (count != ds.length) {
      fail_line(source, line_no, "expected " + std::to_string(ds.length) + " values, got " + std::to_string(count));
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v;
      if (!parse_double(fields[i], v)) {
        fail_line(source, line_no, "value " + std::to_string(i) + " is not a number");
      }
      if (!std::isfinite(v)) fail_line(source, line_no, "value " + std::to_string(i) + " is not finite");
      ds.signals.push_back(v);
    }
    ds.labels.push_back(static_cast<int>(label));
  }
  if (ds.labels.empty()) throw DataError(source + ": no rows");
  return ds;
}

SignalDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return parse_dataset(in, path.string());
}

void write_dataset(const SignalDataset& ds, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.labels[i];
    for (double v : ds.signal(i)) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

void save_dataset(const SignalDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset " + path.string());
  write_dataset(ds, out);
  if (!out) throw DataError("failed writing dataset " + path.string());
}

std::vector<std::size_t> shuffled(std::span<const std::size_t> indices, std::uint64_t seed) {
  std::vector<std::size_t> out(indices.begin(), indices.end());
  SplitMix64 rng(seed);
  for (std::size_t i = out.size(); i-- > 1;) std::swap(out[i], out[rng.below(i + 1)]);
  return out;
}

SplitIndices split(std::size_t n, double valid_frac, std::uint64_t seed) {
  if (!(valid_frac > 0.0 && valid_frac < 1.0)) {
    throw ConfigError("split: valid_frac must lie in (0, 1), got " + std::to_string(valid_frac));
  }
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const std::vector<std::size_t> perm = shuffled(all, seed);
  const auto n_valid = static_cast<std::size_t>(std::llround(valid_frac * static_cast<double>(n)));
  SplitIndices out;
  out.seed = seed;
  out.valid.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_valid));
  out.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_valid), perm.end());
  return out;
}

std::vector<std::vector<std::size_t>> plan_batches(std::span<const std::size_t> indices, std::size_t batch_size,
                                                   bool shuffle, std::uint64_t seed, std::size_t epoch) {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  const std::vector<std::size_t> order =
      shuffle ? shuffled(indices, mix_seed(seed, epoch)) : std::vector<std::size_t>(indices.begin(), indices.end());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t stop = std::min(order.size(), start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return out;
}

template <typename T>
Batch<T> gather(const SignalDataset& ds, std::span<const std::size_t> indices) {
  if (indices.empty()) throw ShapeError("gather: empty batch");
  Batch<T> batch{Tensor<T>(Shape{indices.size(), 1, ds.length}), {}};
  for (std::size_t b = 0; b < indices.size(); ++b) {
    if (indices[b] >= ds.size()) throw std::out_of_range("gather: index " + std::to_string(indices[b]));
    const auto row = ds.signal(indices[b]);
    std::transform(row.begin(), row.end(), batch.inputs.raw() + b * ds.length,
                   [](double v) { return static_cast<T>(v); });
    batch.labels.push_back(ds.labels[indices[b]]);
  }
  return batch;
}

template <typename T>
std::vector<Batch<T>> batches(const SignalDataset& ds, std::span<const std::size_t> indices, std::size_t batch_size,
                              bool shuffle, std::uint64_t seed, std::size_t epoch) {
  std::vector<Batch<T>> out;
  for (const auto& plan : plan_batches(indices, batch_size, shuffle, seed, epoch)) {
    out.push_back(gather<T>(ds, plan));
  }
  return out;
}

template <typename T>
Batch<T> standardize(Batch<T> batch) {
  const std::size_t n = batch.inputs.size();
  if (n == 0) throw ShapeError("standardize: empty batch");
  double acc = 0.0;
  for (T v : batch.inputs.data()) acc += v;
  const double mean = acc / static_cast<double>(n);
  double sq = 0.0;
  for (T v : batch.inputs.data()) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(n));
  for (T& v : batch.inputs.data()) v = sd < 1e-12 ? T{0} : static_cast<T>((v - mean) / sd);
  return batch;
}

template Batch<float> gather<float>(const SignalDataset&, std::span<const std::size_t>);
template Batch<double> gather<double>(const SignalDataset&, std::span<const std::size_t>);
template std::vector<Batch<float>> batches<float>(const SignalDataset&, std::span<const std::size_t>, std::size_t,
                                                  bool, std::uint64_t, std::size_t);
template std::vector<Batch<double>> batches<double>(const SignalDataset&, std::span<const std::size_t>, std::size_t,
                                                    bool, std::uint64_t, std::size_t);
template Batch<float> standardize<float>(Batch<float>);
template Batch<double> standardize<double>(Batch<double>);

}  // namespace infracls
