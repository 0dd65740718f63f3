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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infracls/model.hpp"
#include "infracls/optim.hpp"
#include "infracls/pipeline.hpp"

namespace infracls {

enum class Approach { kDirect, kWavelet };
enum class Precision { kFloat32, kFloat64 };

std::string to_string(Approach a);
Approach parse_approach(const std::string& s);
std::string to_string(Precision p);
Precision parse_precision(const std::string& s);

struct LrPolicy {
  enum class Kind { kFixed, kOneCycle, kSlice };

  Kind kind = Kind::kFixed;
  double lr = 1e-3;      ///< fixed rate
  double lr_min = 1e-6;  ///< slice: rate of the group nearest the input
  double lr_max = 1e-2;  ///< one_cycle peak; slice: peak of the head group

  static LrPolicy fixed(double lr);
  static LrPolicy one_cycle(double lr_max);
  static LrPolicy slice(double lr_min, double lr_max);

  /// Rate of each parameter group at optimizer step \p step of \p total_steps.
  /// one_cycle and slice follow OneCycleSchedule; slice gives each group its
  /// own peak from discriminative_lrs().
  std::vector<double> group_rates(std::size_t n_groups, std::size_t step, std::size_t total_steps) const;

  std::string name() const;
};

struct TrainConfig {
  Approach approach = Approach::kDirect;
  std::size_t epochs = 20;
  std::size_t batch_size = 64;
  LrPolicy lr_policy;
  std::uint64_t seed = 0;
  double weight_decay = 0.01;
  Precision precision = Precision::kFloat32;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  nlohmann::json to_json() const;
};

struct EvalReport {
  double accuracy = 0.0;
  double loss = 0.0;
  std::size_t count = 0;
  std::vector<std::vector<std::size_t>> confusion;  ///< rows true, columns predicted
  std::vector<double> precision;                    ///< 0 for never-predicted classes
  std::vector<double> recall;                       ///< 0 for absent classes

  nlohmann::json to_json() const;
};

/// Accumulates logits and labels into an EvalReport.
class EvalAccumulator {
 public:
  explicit EvalAccumulator(std::size_t n_classes);

  template <typename T>
  void add(const Tensor<T>& logits, std::span<const int> labels);
  EvalReport report() const;

 private:
  std::size_t n_classes_;
  std::vector<std::vector<std::size_t>> confusion_;
  double loss_sum_ = 0.0;
  std::size_t count_ = 0;
};

/// Eval-mode pass over \p indices; parameters and running statistics are
/// left untouched. Throws DataError when \p indices is empty.
template <typename T>
EvalReport evaluate(Model<T>& model, const SampleSource<T>& data, std::span<const std::size_t> indices,
                    std::size_t batch_size = 64);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double accuracy = 0.0;
};

template <typename T>
struct TrainResult {
  std::vector<EpochRecord> history;
  std::vector<double> epoch_seconds;
  EvalReport final_report;
  std::size_t best_epoch = 0;
  double best_accuracy = -1.0;
  std::vector<Tensor<T>> best_state;
  std::size_t optimizer_steps = 0;
  std::size_t samples_seen = 0;
  std::size_t points_per_sample = 0;
  std::size_t points_seen = 0;
};

/// {"epochs":[{"epoch","train_loss","valid_loss","accuracy"}...],"confusion":[[...]]}
nlohmann::json history_json(std::span<const EpochRecord> history, const EvalReport& report);

struct TrainCallbacks {
  std::function<void(const EpochRecord&, double seconds)> on_epoch;
};

/// Trains on split.train and evaluates on split.valid after every epoch.
/// The model ends with its final weights; the best-accuracy state is kept in
/// the result. Throws NumericError with the epoch and step on a non-finite loss.
template <typename T>
TrainResult<T> train(Model<T>& model, const SampleSource<T>& data, const SplitIndices& split,
                     const TrainConfig& cfg, const TrainCallbacks& callbacks = {});

struct LrFindOptions {
  double start = 1e-7;
  double end = 10.0;
  std::size_t n_iter = 100;
  double smoothing = 0.98;
  double divergence_factor = 4.0;
};

struct LrFindResult {
  std::vector<double> lrs;
  std::vector<double> losses;
  std::vector<double> smoothed;
  std::optional<double> suggestion;
  bool diverged = false;

  nlohmann::json to_json() const;
};

/// start * (end/start)^(k/(n_iter-1)).
double lr_find_rate(const LrFindOptions& options, std::size_t k);

/// Generic sweep. \p step evaluates the loss at the current point, applies
/// one update at the given rate and returns the loss. Stops when the
/// bias-corrected exponentially smoothed loss exceeds divergence_factor times
/// its best value or the loss is non-finite. The suggestion is the rate at
/// the steepest descent of the smoothed loss against log(lr); it is absent
/// when the first step already diverges.
LrFindResult lr_sweep(const LrFindOptions& options, const std::function<double(double)>& step);

/// Model sweep with Adam on shuffled training batches. Weights and running
/// statistics are restored bit-exactly afterwards.
template <typename T>
LrFindResult lr_find(Model<T>& model, const SampleSource<T>& data, std::span<const std::size_t> train_indices,
                     const TrainConfig& cfg, const LrFindOptions& options = {});

}  // namespace infracls
