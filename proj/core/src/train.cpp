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

#include "infracls/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace infracls {

std::string to_string(Approach a) { return a == Approach::kDirect ? "direct" : "wavelet"; }

Approach parse_approach(const std::string& s) {
  if (s == "direct") return Approach::kDirect;
  if (s == "wavelet") return Approach::kWavelet;
  throw ConfigError("approach must be 'direct' or 'wavelet', got '" + s + "'");
}

std::string to_string(Precision p) { return p == Precision::kFloat32 ? "float32" : "float64"; }

Precision parse_precision(const std::string& s) {
  if (s == "float32" || s == "f32") return Precision::kFloat32;
  if (s == "float64" || s == "f64") return Precision::kFloat64;
  throw ConfigError("precision must be 'float32' or 'float64', got '" + s + "'");
}

LrPolicy LrPolicy::fixed(double lr) {
  LrPolicy p;
  p.kind = Kind::kFixed;
  p.lr = lr;
  return p;
}

LrPolicy LrPolicy::one_cycle(double lr_max) {
  LrPolicy p;
  p.kind = Kind::kOneCycle;
  p.lr_max = lr_max;
  return p;
}

LrPolicy LrPolicy::slice(double lr_min, double lr_max) {
  LrPolicy p;
  p.kind = Kind::kSlice;
  p.lr_min = lr_min;
  p.lr_max = lr_max;
  return p;
}

std::vector<double> LrPolicy::group_rates(std::size_t n_groups, std::size_t step, std::size_t total_steps) const {
  switch (kind) {
    case Kind::kFixed:
      return std::vector<double>(n_groups, lr);
    case Kind::kOneCycle:
      return std::vector<double>(n_groups, one_cycle_lr({lr_max, total_steps}, step));
    case Kind::kSlice: {
      std::vector<double> rates = discriminative_lrs(lr_min, lr_max, n_groups);
      for (double& r : rates) r = one_cycle_lr({r, total_steps}, step);
      return rates;
    }
  }
  return {};
}

std::string LrPolicy::name() const {
  switch (kind) {
    case Kind::kFixed:
      return "fixed";
    case Kind::kOneCycle:
      return "one_cycle";
    case Kind::kSlice:
      return "slice";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("TrainConfig.epochs: must be at least 1");
  if (batch_size < 1) throw ConfigError("TrainConfig.batch_size: must be at least 1");
  if (!(weight_decay >= 0.0)) throw ConfigError("TrainConfig.weight_decay: must be non-negative");
  switch (lr_policy.kind) {
    case LrPolicy::Kind::kFixed:
      if (!(lr_policy.lr > 0.0)) throw ConfigError("TrainConfig.lr: must be positive");
      break;
    case LrPolicy::Kind::kOneCycle:
      if (!(lr_policy.lr_max > 0.0)) throw ConfigError("TrainConfig.lr_max: must be positive");
      break;
    case LrPolicy::Kind::kSlice:
      if (!(lr_policy.lr_min > 0.0)) throw ConfigError("TrainConfig.lr_min: must be positive");
      if (!(lr_policy.lr_min <= lr_policy.lr_max)) throw ConfigError("TrainConfig.lr_min: must not exceed lr_max");
      break;
  }
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json policy = {{"kind", lr_policy.name()}};
  switch (lr_policy.kind) {
    case LrPolicy::Kind::kFixed:
      policy["lr"] = lr_policy.lr;
      break;
    case LrPolicy::Kind::kOneCycle:
      policy["lr_max"] = lr_policy.lr_max;
      break;
    case LrPolicy::Kind::kSlice:
      policy["lr_min"] = lr_policy.lr_min;
      policy["lr_max"] = lr_policy.lr_max;
      break;
  }
  return {{"approach", to_string(approach)}, {"epochs", epochs},           {"batch_size", batch_size},
          {"lr_policy", policy},             {"seed", seed},               {"weight_decay", weight_decay},
          {"precision", to_string(precision)}};
}

nlohmann::json EvalReport::to_json() const {
  return {{"accuracy", accuracy}, {"loss", loss},           {"count", count},
          {"confusion", confusion}, {"precision", precision}, {"recall", recall}};
}

EvalAccumulator::EvalAccumulator(std::size_t n_classes)
    : n_classes_(n_classes), confusion_(n_classes, std::vector<std::size_t>(n_classes, 0)) {}

template <typename T>
void EvalAccumulator::add(const Tensor<T>& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size() || logits.dim(1) != n_classes_) {
    throw ShapeError("EvalAccumulator: logits " + to_string(logits.shape()) + " do not match " +
                     std::to_string(labels.size()) + " labels and " + std::to_string(n_classes_) + " classes");
  }
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const T* row = logits.raw() + b * n_classes_;
    const auto pred = static_cast<std::size_t>(std::max_element(row, row + n_classes_) - row);
    const double m = row[pred];
    double s = 0.0;
    for (std::size_t k = 0; k < n_classes_; ++k) s += std::exp(row[k] - m);
    const auto label = static_cast<std::size_t>(labels[b]);
    if (label >= n_classes_) throw std::out_of_range("EvalAccumulator: label " + std::to_string(labels[b]));
    loss_sum_ += std::log(s) - (row[label] - m);
    ++confusion_[label][pred];
    ++count_;
  }
}

EvalReport EvalAccumulator::report() const {
  EvalReport r;
  r.count = count_;
  r.confusion = confusion_;
  r.loss = count_ > 0 ? loss_sum_ / static_cast<double>(count_) : 0.0;
  std::size_t correct = 0;
  for (std::size_t k = 0; k < n_classes_; ++k) {
    correct += confusion_[k][k];
    std::size_t row = 0;
    std::size_t col = 0;
    for (std::size_t j = 0; j < n_classes_; ++j) {
      row += confusion_[k][j];
      col += confusion_[j][k];
    }
    r.recall.push_back(row > 0 ? static_cast<double>(confusion_[k][k]) / static_cast<double>(row) : 0.0);
    r.precision.push_back(col > 0 ? static_cast<double>(confusion_[k][k]) / static_cast<double>(col) : 0.0);
  }
  r.accuracy = count_ > 0 ? static_cast<double>(correct) / static_cast<double>(count_) : 0.0;
  return r;
}

template <typename T>
EvalReport evaluate(Model<T>& model, const SampleSource<T>& data, std::span<const std::size_t> indices,
                    std::size_t batch_size) {
  if (indices.empty()) throw DataError("evaluate: validation set is empty");
  EvalAccumulator acc(model.n_classes());
  for (const auto& plan : plan_batches(indices, batch_size, false, 0, 0)) {
    const Batch<T> batch = data.make_batch(plan);
    acc.add(model.logits(batch.inputs, Mode::kEval), batch.labels);
  }
  return acc.report();
}

nlohmann::json history_json(std::span<const EpochRecord> history, const EvalReport& report) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochRecord& r : history) {
    epochs.push_back(
        {{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"valid_loss", r.valid_loss}, {"accuracy", r.accuracy}});
  }
  return {{"epochs", epochs}, {"confusion", report.confusion}};
}

namespace {

template <typename T>
void check_source(Model<T>& model, const SampleSource<T>& data) {
  if (data.sample_shape() != model.sample_shape()) {
    throw ShapeError(model.architecture() + " expects samples " + to_string(model.sample_shape()) +
                     ", data provides " + to_string(data.sample_shape()));
  }
}

// Forward + loss + backward on one batch; returns the loss.
template <typename T>
double forward_backward(Model<T>& model, const Batch<T>& batch) {
  model.zero_grad();
  Tape<T> tape;
  const Var logits = model.forward(tape, tape.constant(batch.inputs), Mode::kTrain);
  const auto ce = softmax_cross_entropy(tape, logits, batch.labels);
  const double loss = tape.value(ce.loss)[0];
  if (std::isfinite(loss)) tape.backward(ce.loss);
  return loss;
}

}  // namespace

template <typename T>
TrainResult<T> train(Model<T>& model, const SampleSource<T>& data, const SplitIndices& split, const TrainConfig& cfg,
                     const TrainCallbacks& callbacks) {
  cfg.validate();
  check_source(model, data);
  if (split.train.empty()) throw DataError("train: training set is empty");
  if (split.valid.empty()) throw DataError("train: validation set is empty");

  auto groups = model.parameter_groups();
  const std::size_t n_groups = groups.size();
  Adam<T> adam(std::move(groups), cfg.weight_decay);
  const std::size_t steps_per_epoch = (split.train.size() + cfg.batch_size - 1) / cfg.batch_size;
  const std::size_t total_steps = cfg.epochs * steps_per_epoch;

  TrainResult<T> result;
  result.points_per_sample = data.points_per_sample();
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (const auto& plan : plan_batches(split.train, cfg.batch_size, true, cfg.seed, epoch)) {
      const Batch<T> batch = data.make_batch(plan);
      const double loss = forward_backward(model, batch);
      const std::string where = " at epoch " + std::to_string(epoch + 1) + ", step " + std::to_string(step);
      if (!std::isfinite(loss)) throw NumericError("non-finite training loss" + where);
      try {
        adam.step(cfg.lr_policy.group_rates(n_groups, step, total_steps));
      } catch (const NumericError& e) {
        throw NumericError(e.what() + where);
      }
      ++step;
      loss_sum += loss * static_cast<double>(plan.size());
      seen += plan.size();
      result.samples_seen += plan.size();
      result.points_seen += plan.size() * result.points_per_sample;
    }
    const EvalReport report = evaluate(model, data, split.valid, cfg.batch_size);
    if (!std::isfinite(report.loss)) {
      throw NumericError("non-finite validation loss after epoch " + std::to_string(epoch + 1));
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const EpochRecord record{epoch + 1, loss_sum / static_cast<double>(seen), report.loss, report.accuracy};
    result.history.push_back(record);
    result.epoch_seconds.push_back(seconds);
    result.final_report = report;
    if (report.accuracy > result.best_accuracy) {
      result.best_accuracy = report.accuracy;
      result.best_epoch = epoch + 1;
      result.best_state = model.snapshot();
    }
    if (callbacks.on_epoch) callbacks.on_epoch(record, seconds);
  }
  result.optimizer_steps = adam.steps();
  return result;
}

double lr_find_rate(const LrFindOptions& options, std::size_t k) {
  if (options.n_iter < 2) return options.start;
  if (k == options.n_iter - 1) return options.end;
  const double pct = static_cast<double>(k) / static_cast<double>(options.n_iter - 1);
  return options.start * std::pow(options.end / options.start, pct);
}

LrFindResult lr_sweep(const LrFindOptions& options, const std::function<double(double)>& step) {
  LrFindResult result;
  double avg = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < options.n_iter; ++k) {
    const double lr = lr_find_rate(options, k);
    const double loss = step(lr);
    result.lrs.push_back(lr);
    result.losses.push_back(loss);
    if (!std::isfinite(loss)) {
      result.smoothed.push_back(loss);
      result.diverged = true;
      break;
    }
    avg = options.smoothing * avg + (1.0 - options.smoothing) * loss;
    const double smoothed = avg / (1.0 - std::pow(options.smoothing, static_cast<double>(k + 1)));
    result.smoothed.push_back(smoothed);
    if (k > 0 && smoothed > options.divergence_factor * best) {
      result.diverged = true;
      break;
    }
    best = std::min(best, smoothed);
  }

  // Finite prefix of the curve; the suggestion needs at least two points.
  std::size_t n = 0;
  while (n < result.smoothed.size() && std::isfinite(result.smoothed[n])) ++n;
  if (n < 2) return result;
  std::vector<double> slope(n);
  auto log_lr = [&](std::size_t i) { return std::log(result.lrs[i]); };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? i : i + 1;
    slope[i] = (result.smoothed[hi] - result.smoothed[lo]) / (log_lr(hi) - log_lr(lo));
  }
  const auto steepest = static_cast<std::size_t>(std::min_element(slope.begin(), slope.end()) - slope.begin());
  if (slope[steepest] < 0.0) result.suggestion = result.lrs[steepest];
  return result;
}

nlohmann::json LrFindResult::to_json() const {
  nlohmann::json j = {{"lrs", lrs}, {"losses", losses}, {"smoothed", smoothed}, {"diverged", diverged}};
  j["suggestion"] = suggestion ? nlohmann::json(*suggestion) : nlohmann::json(nullptr);
  return j;
}

template <typename T>
LrFindResult lr_find(Model<T>& model, const SampleSource<T>& data, std::span<const std::size_t> train_indices,
                     const TrainConfig& cfg, const LrFindOptions& options) {
  cfg.validate();
  check_source(model, data);
  if (train_indices.empty()) throw DataError("lr_find: training set is empty");

  const std::vector<Tensor<T>> entry_state = model.snapshot();
  struct Restore {
    Model<T>& model;
    const std::vector<Tensor<T>>& state;
    ~Restore() { model.restore(state); }
  } restore{model, entry_state};

  auto groups = model.parameter_groups();
  const std::size_t n_groups = groups.size();
  Adam<T> adam(std::move(groups), cfg.weight_decay);
  std::size_t epoch = 0;
  std::vector<std::vector<std::size_t>> plans;
  std::size_t next = 0;

  return lr_sweep(options, [&](double lr) {
    if (next == plans.size()) {
      plans = plan_batches(train_indices, cfg.batch_size, true, cfg.seed, epoch++);
      next = 0;
    }
    const double loss = forward_backward(model, data.make_batch(plans[next++]));
    if (!std::isfinite(loss)) return loss;
    try {
      adam.step(std::vector<double>(n_groups, lr));
    } catch (const NumericError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return loss;
  });
}

#define INFRACLS_INSTANTIATE_TRAIN(T)                                                                           \
  template void EvalAccumulator::add<T>(const Tensor<T>&, std::span<const int>);                                \
  template EvalReport evaluate<T>(Model<T>&, const SampleSource<T>&, std::span<const std::size_t>, std::size_t); \
  template TrainResult<T> train<T>(Model<T>&, const SampleSource<T>&, const SplitIndices&, const TrainConfig&,   \
                                   const TrainCallbacks&);                                                       \
  template LrFindResult lr_find<T>(Model<T>&, const SampleSource<T>&, std::span<const std::size_t>,             \
                                   const TrainConfig&, const LrFindOptions&);

INFRACLS_INSTANTIATE_TRAIN(float)
INFRACLS_INSTANTIATE_TRAIN(double)

#undef INFRACLS_INSTANTIATE_TRAIN

}  // namespace infracls
