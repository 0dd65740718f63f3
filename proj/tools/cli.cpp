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

#include "cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "infracls/checkpoint.hpp"
#include "infracls/dataset.hpp"
#include "infracls/inception.hpp"
#include "infracls/pipeline.hpp"
#include "infracls/resnet.hpp"
#include "infracls/synth.hpp"
#include "infracls/train.hpp"
#include "infracls/wavelet.hpp"

namespace infracls::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + hex;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing " + path.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Resolved configuration, seeds and content hashes of every input and output.
void write_manifest(const fs::path& path, const std::string& command, const json& config, const json& seeds,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
  json in = json::object();
  for (const auto& p : inputs) in[p.string()] = hash_file(p);
  json out = json::object();
  for (const auto& p : outputs) out[p.filename().string()] = hash_file(p);
  write_json(path, {{"tool", "infracls"},
                    {"command", command},
                    {"config", config},
                    {"seeds", seeds},
                    {"inputs", in},
                    {"outputs", out}});
}

void echo_config(std::ostream& log, const std::string& command, const json& config) {
  log << "[" << command << "] resolved config:";
  for (const auto& [key, value] : config.items()) log << " " << key << "=" << value.dump();
  log << "\n";
}

// "key = value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Argument structs

struct SynthArgs {
  std::size_t n = 2400;
  std::size_t length = 94;
  std::uint64_t seed = 42;
  double noise = 0.3;
  std::string out;

  json to_json() const { return {{"n", n}, {"length", length}, {"seed", seed}, {"noise", noise}, {"out", out}}; }
};

struct TrainArgs {
  std::string data;
  std::string approach = "direct";
  std::size_t epochs = 0;  // 0: approach default
  double lr = 1e-3;
  double lr_min = 1e-6;
  double lr_max = 0.0;  // 0: approach default
  std::string lr_policy = "auto";
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 42;
  double valid_frac = 0.2;
  double weight_decay = 0.01;
  std::string precision = "float32";
  double omega0 = 6.0;
  std::string out = "run";
};

struct LrFindArgs {
  std::string data;
  std::string approach = "direct";
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 42;
  double valid_frac = 0.2;
  double weight_decay = 0.01;
  std::string precision = "float32";
  double omega0 = 6.0;
  double start = 1e-7;
  double end = 10.0;
  std::size_t iters = 100;
  std::string out = "lr_find.json";
};

struct CwtArgs {
  std::string data;
  std::string out;
  double omega0 = 6.0;
};

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string out = "report.json";
  bool all = false;
  std::size_t batch_size = 64;
};

struct PredictArgs {
  std::string checkpoint;
  std::string input;
  std::string out = "predictions.json";
  std::size_t batch_size = 64;
};

constexpr std::size_t kDirectEpochs = 20;
constexpr std::size_t kWaveletEpochs = 10;
constexpr double kDirectLrMax = 1e-2;
constexpr double kWaveletLrMax = 2e-2;

TrainConfig resolve_train_config(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.approach = parse_approach(a.approach);
  const bool wavelet = cfg.approach == Approach::kWavelet;
  cfg.epochs = a.epochs != 0 ? a.epochs : (wavelet ? kWaveletEpochs : kDirectEpochs);
  cfg.batch_size = a.batch_size;
  cfg.seed = a.seed;
  cfg.weight_decay = a.weight_decay;
  cfg.precision = parse_precision(a.precision);
  const double lr_max = a.lr_max != 0.0 ? a.lr_max : (wavelet ? kWaveletLrMax : kDirectLrMax);
  std::string policy = a.lr_policy;
  if (policy == "auto") policy = wavelet ? "one_cycle" : "fixed";
  if (policy == "fixed") {
    cfg.lr_policy = LrPolicy::fixed(a.lr);
  } else if (policy == "one_cycle") {
    cfg.lr_policy = LrPolicy::one_cycle(lr_max);
  } else if (policy == "slice") {
    cfg.lr_policy = LrPolicy::slice(a.lr_min, lr_max);
  } else {
    throw ConfigError("lr-policy must be fixed, one_cycle, slice or auto, got '" + a.lr_policy + "'");
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Data preparation shared by train, lr-find, eval and predict

template <typename T>
struct Prepared {
  SignalDataset ds;
  ImageSet images;
  ChannelStats stats;
  std::unique_ptr<SampleSource<T>> source;
};

template <typename T>
void attach_source(Prepared<T>& p, Approach approach, double omega0, std::optional<ChannelStats> stats,
                   std::span<const std::size_t> stats_indices, std::ostream& log) {
  if (approach == Approach::kDirect) {
    p.source = std::make_unique<SignalSource<T>>(p.ds);
    return;
  }
  WaveletConfig wcfg;
  wcfg.omega0 = omega0;
  const auto started = std::chrono::steady_clock::now();
  p.images = build_scalogram_images(p.ds, wcfg);
  log << "built " << p.images.size() << " scalogram images (" << p.images.height << "x" << p.images.width << ") in "
      << std::fixed << std::setprecision(1)
      << std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() << " s\n"
      << std::defaultfloat;
  p.stats = stats ? *stats : channel_stats(p.images, stats_indices);
  p.source = std::make_unique<ImageSource<T>>(p.images, p.stats);
}

json stats_json(const ChannelStats& s) { return {{"mean", s.mean}, {"std", s.std}}; }

ChannelStats stats_from_json(const json& j) {
  ChannelStats s;
  s.mean = j.at("mean").get<std::array<double, 3>>();
  s.std = j.at("std").get<std::array<double, 3>>();
  return s;
}

template <typename T>
std::unique_ptr<Model<T>> build_model(Approach approach, std::size_t length, std::uint64_t seed) {
  if (approach == Approach::kDirect) {
    InceptionConfig cfg;
    cfg.input_length = length;
    return build_inception_time<T>(cfg, seed);
  }
  ResNet2DConfig cfg;
  cfg.input_size = {length, length};
  return build_small_resnet<T>(cfg, seed);
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_synth(const SynthArgs& a, std::ostream& log) {
  const json config = a.to_json();
  echo_config(log, "synth", config);
  SynthConfig cfg{a.n, a.length, a.seed, a.noise};
  const SignalDataset ds = generate(cfg);
  const fs::path out(a.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  save_dataset(ds, out);
  fs::path manifest = out;
  manifest += ".manifest.json";
  write_manifest(manifest, "synth", config, {{"seed", a.seed}}, {}, {out});
  log << "wrote " << ds.size() << " signals of length " << ds.length << " to " << out.string() << "\n";
  return kOk;
}

template <typename T>
int cmd_train(const TrainArgs& a, const TrainConfig& cfg, std::ostream& log) {
  json config = cfg.to_json();
  config["data"] = a.data;
  config["split_seed"] = a.split_seed;
  config["valid_frac"] = a.valid_frac;
  config["omega0"] = a.omega0;
  config["out"] = a.out;
  echo_config(log, "train", config);

  Prepared<T> p;
  p.ds = load_dataset(a.data);
  const SplitIndices split = infracls::split(p.ds.size(), a.valid_frac, a.split_seed);
  attach_source(p, cfg.approach, a.omega0, std::nullopt, split.train, log);
  auto model = build_model<T>(cfg.approach, p.ds.length, cfg.seed);
  log << model->architecture() << ": " << model->parameter_count() << " parameters, " << split.train.size()
      << " train / " << split.valid.size() << " valid signals\n";

  TrainCallbacks callbacks;
  callbacks.on_epoch = [&](const EpochRecord& r, double seconds) {
    log << "epoch " << r.epoch << "/" << cfg.epochs << "  train_loss " << std::setprecision(4) << r.train_loss
        << "  valid_loss " << r.valid_loss << "  accuracy " << r.accuracy << "  (" << std::setprecision(3) << seconds
        << " s)\n"
        << std::defaultfloat;
  };
  const TrainResult<T> result = infracls::train(*model, *p.source, split, cfg, callbacks);

  const fs::path dir(a.out);
  ensure_directory(dir);
  json metadata = {{"approach", to_string(cfg.approach)},
                   {"split_seed", a.split_seed},
                   {"valid_frac", a.valid_frac},
                   {"batch_size", cfg.batch_size},
                   {"omega0", a.omega0},
                   {"input_length", p.ds.length},
                   {"train_config", cfg.to_json()}};
  if (cfg.approach == Approach::kWavelet) metadata["channel_stats"] = stats_json(p.stats);
  json best_meta = metadata;
  best_meta["epoch"] = result.best_epoch;
  best_meta["accuracy"] = result.best_accuracy;
  json last_meta = metadata;
  last_meta["epoch"] = cfg.epochs;
  last_meta["accuracy"] = result.final_report.accuracy;

  const fs::path history = dir / "history.json";
  const fs::path report = dir / "report.json";
  const fs::path best = dir / "model.ckpt";
  const fs::path last = dir / "last.ckpt";
  write_json(history, history_json(result.history, result.final_report));
  write_json(report, result.final_report.to_json());
  save_checkpoint(best, *model, result.best_state, best_meta);
  save_checkpoint(last, *model, last_meta);
  write_manifest(dir / "manifest.json", "train", config, {{"seed", cfg.seed}, {"split_seed", a.split_seed}},
                 {fs::path(a.data)}, {history, report, best, last});
  log << "final accuracy " << result.final_report.accuracy << ", best " << result.best_accuracy << " at epoch "
      << result.best_epoch << "; outputs in " << dir.string() << "\n";
  return kOk;
}

template <typename T>
int cmd_lr_find(const LrFindArgs& a, std::ostream& log) {
  TrainConfig cfg;
  cfg.approach = parse_approach(a.approach);
  cfg.batch_size = a.batch_size;
  cfg.seed = a.seed;
  cfg.weight_decay = a.weight_decay;
  cfg.precision = parse_precision(a.precision);
  LrFindOptions options;
  options.start = a.start;
  options.end = a.end;
  options.n_iter = a.iters;
  if (!(options.start > 0.0 && options.start < options.end)) throw ConfigError("lr-find: need 0 < start < end");
  if (options.n_iter < 2) throw ConfigError("lr-find: iters must be at least 2");

  json config = cfg.to_json();
  config.erase("epochs");
  config.erase("lr_policy");
  config.update({{"data", a.data}, {"split_seed", a.split_seed}, {"valid_frac", a.valid_frac}, {"omega0", a.omega0},
                 {"start", a.start}, {"end", a.end}, {"iters", a.iters}, {"out", a.out}});
  echo_config(log, "lr-find", config);

  Prepared<T> p;
  p.ds = load_dataset(a.data);
  const SplitIndices split = infracls::split(p.ds.size(), a.valid_frac, a.split_seed);
  attach_source(p, cfg.approach, a.omega0, std::nullopt, split.train, log);
  auto model = build_model<T>(cfg.approach, p.ds.length, cfg.seed);
  const LrFindResult result = lr_find(*model, *p.source, split.train, cfg, options);

  const fs::path out(a.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  write_json(out, result.to_json());
  fs::path manifest = out;
  manifest += ".manifest.json";
  write_manifest(manifest, "lr-find", config, {{"seed", cfg.seed}, {"split_seed", a.split_seed}},
                 {fs::path(a.data)}, {out});
  if (result.suggestion) {
    log << "suggested learning rate " << *result.suggestion << " (" << result.lrs.size() << " iterations)\n";
  } else {
    log << "no learning-rate suggestion: loss diverged immediately\n";
  }
  return kOk;
}

int cmd_cwt_export(const CwtArgs& a, std::ostream& log) {
  const json config = {{"data", a.data}, {"out", a.out}, {"omega0", a.omega0}};
  echo_config(log, "cwt-export", config);
  const SignalDataset ds = load_dataset(a.data);
  WaveletConfig wcfg;
  wcfg.omega0 = a.omega0;
  const std::vector<double> scales = default_scales(ds.length, wcfg);
  const fs::path dir(a.out);
  ensure_directory(dir);
  const std::string stem = fs::path(a.data).stem().string();
  std::vector<fs::path> outputs;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const fs::path file = dir / (stem + "_" + std::to_string(i) + "_" + std::to_string(ds.labels[i]) + ".png");
    write_png(file, render_heatmap(cwt(ds.signal(i), scales, wcfg)));
    outputs.push_back(file);
  }
  write_manifest(dir / "manifest.json", "cwt-export", config, json::object(), {fs::path(a.data)}, outputs);
  log << "wrote " << outputs.size() << " heatmaps (" << scales.size() << "x" << ds.length << ") to " << dir.string()
      << "\n";
  return kOk;
}

template <typename T>
Prepared<T> prepare_from_checkpoint(const Checkpoint& ckpt, const std::string& data, std::span<const std::size_t> idx,
                                    std::ostream& log) {
  const json& meta = ckpt.metadata();
  Prepared<T> p;
  p.ds = load_dataset(data);
  const std::size_t expected = meta.at("input_length").get<std::size_t>();
  if (p.ds.length != expected) {
    throw DataError(data + ": signals have length " + std::to_string(p.ds.length) + ", checkpoint expects " +
                    std::to_string(expected));
  }
  const Approach approach = parse_approach(meta.at("approach").get<std::string>());
  std::optional<ChannelStats> stats;
  if (meta.contains("channel_stats")) stats = stats_from_json(meta.at("channel_stats"));
  attach_source(p, approach, meta.value("omega0", 6.0), stats, idx, log);
  return p;
}

template <typename T>
int cmd_eval(const EvalArgs& a, std::ostream& log) {
  const json config = {{"checkpoint", a.checkpoint}, {"data", a.data},           {"out", a.out},
                       {"all", a.all},               {"batch_size", a.batch_size}};
  echo_config(log, "eval", config);
  const Checkpoint ckpt = read_checkpoint(a.checkpoint);
  const json& meta = ckpt.metadata();
  auto model = model_from_checkpoint<T>(ckpt);

  Prepared<T> p = prepare_from_checkpoint<T>(ckpt, a.data, {}, log);
  std::vector<std::size_t> indices;
  if (a.all) {
    indices.resize(p.ds.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  } else {
    indices = split(p.ds.size(), meta.at("valid_frac").get<double>(), meta.at("split_seed").get<std::uint64_t>()).valid;
  }
  const EvalReport report = evaluate(*model, *p.source, indices, a.batch_size);
  const fs::path out(a.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  write_json(out, report.to_json());
  fs::path manifest = out;
  manifest += ".manifest.json";
  write_manifest(manifest, "eval", config, json::object(), {fs::path(a.checkpoint), fs::path(a.data)}, {out});
  log << "accuracy " << report.accuracy << " on " << report.count << " signals\n";
  return kOk;
}

template <typename T>
int cmd_predict(const PredictArgs& a, std::ostream& log) {
  const json config = {{"checkpoint", a.checkpoint}, {"input", a.input}, {"out", a.out}, {"batch_size", a.batch_size}};
  echo_config(log, "predict", config);
  const Checkpoint ckpt = read_checkpoint(a.checkpoint);
  auto model = model_from_checkpoint<T>(ckpt);
  Prepared<T> p = prepare_from_checkpoint<T>(ckpt, a.input, {}, log);

  std::vector<std::size_t> order(p.ds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  json rows = json::array();
  for (const auto& plan : plan_batches(order, a.batch_size, false, 0, 0)) {
    const Batch<T> batch = p.source->make_batch(plan);
    const Tensor<T> logits = model->logits(batch.inputs, Mode::kEval);
    const std::size_t k = model->n_classes();
    for (std::size_t b = 0; b < plan.size(); ++b) {
      const T* row = logits.raw() + b * k;
      const double m = *std::max_element(row, row + k);
      std::vector<double> probs(k);
      double s = 0.0;
      for (std::size_t c = 0; c < k; ++c) s += probs[c] = std::exp(row[c] - m);
      for (double& v : probs) v /= s;
      const auto pred = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
      rows.push_back({{"index", plan[b]}, {"predicted", pred}, {"probabilities", probs}});
    }
  }
  const fs::path out(a.out);
  if (out.has_parent_path()) ensure_directory(out.parent_path());
  write_json(out, {{"predictions", rows}});
  fs::path manifest = out;
  manifest += ".manifest.json";
  write_manifest(manifest, "predict", config, json::object(), {fs::path(a.checkpoint), fs::path(a.input)}, {out});
  log << "wrote " << rows.size() << " predictions to " << out.string() << "\n";
  return kOk;
}

template <typename F>
int dispatch_precision(Precision precision, F&& f) {
  return precision == Precision::kFloat64 ? f(double{}) : f(float{});
}

Precision checkpoint_precision(const std::string& path) {
  const Checkpoint ckpt = read_checkpoint(path);
  const json& meta = ckpt.metadata();
  if (meta.contains("train_config")) return parse_precision(meta["train_config"].value("precision", "float32"));
  return Precision::kFloat32;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& log) {
  CLI::App app{"infracls: infrasound-style signal classification toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  SynthArgs synth;
  TrainArgs train_args;
  LrFindArgs lr_args;
  CwtArgs cwt_args;
  EvalArgs eval_args;
  PredictArgs predict_args;
  std::string config_path;

  auto* s = app.add_subcommand("synth", "Generate the synthetic 8-class dataset");
  s->add_option("--n", synth.n, "Number of signals (multiple of 8)")->capture_default_str();
  s->add_option("--length", synth.length, "Samples per signal")->capture_default_str();
  s->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  s->add_option("--noise", synth.noise, "Noise std relative to signal RMS")->capture_default_str();
  s->add_option("--out", synth.out, "Output dataset file")->required();

  auto* t = app.add_subcommand("train", "Train a classifier (direct or wavelet approach)");
  t->add_option("--data", train_args.data, "Dataset file")->required();
  t->add_option("--approach", train_args.approach, "direct | wavelet")->capture_default_str();
  t->add_option("--epochs", train_args.epochs, "Epochs (default: 20 direct, 10 wavelet)");
  t->add_option("--lr", train_args.lr, "Learning rate of the fixed policy")->capture_default_str();
  t->add_option("--lr-min", train_args.lr_min, "Slice policy: rate of the input-side group")->capture_default_str();
  t->add_option("--lr-max", train_args.lr_max, "Peak rate (default: 1e-2 direct, 2e-2 wavelet)");
  t->add_option("--lr-policy", train_args.lr_policy, "fixed | one_cycle | slice | auto")->capture_default_str();
  t->add_option("--batch-size", train_args.batch_size, "Batch size")->capture_default_str();
  t->add_option("--seed", train_args.seed, "Initialization and shuffling seed")->capture_default_str();
  t->add_option("--split-seed", train_args.split_seed, "Train/validation split seed")->capture_default_str();
  t->add_option("--valid-frac", train_args.valid_frac, "Validation fraction")->capture_default_str();
  t->add_option("--weight-decay", train_args.weight_decay, "Decoupled weight decay")->capture_default_str();
  t->add_option("--precision", train_args.precision, "float32 | float64")->capture_default_str();
  t->add_option("--omega0", train_args.omega0, "Morlet center frequency (wavelet approach)")->capture_default_str();
  t->add_option("--out", train_args.out, "Output directory")->capture_default_str();

  auto* l = app.add_subcommand("lr-find", "Sweep the learning rate and suggest one");
  l->add_option("--data", lr_args.data, "Dataset file")->required();
  l->add_option("--approach", lr_args.approach, "direct | wavelet")->capture_default_str();
  l->add_option("--batch-size", lr_args.batch_size, "Batch size")->capture_default_str();
  l->add_option("--seed", lr_args.seed, "Initialization and shuffling seed")->capture_default_str();
  l->add_option("--split-seed", lr_args.split_seed, "Train/validation split seed")->capture_default_str();
  l->add_option("--valid-frac", lr_args.valid_frac, "Validation fraction")->capture_default_str();
  l->add_option("--weight-decay", lr_args.weight_decay, "Decoupled weight decay")->capture_default_str();
  l->add_option("--precision", lr_args.precision, "float32 | float64")->capture_default_str();
  l->add_option("--omega0", lr_args.omega0, "Morlet center frequency (wavelet approach)")->capture_default_str();
  l->add_option("--start", lr_args.start, "First learning rate")->capture_default_str();
  l->add_option("--end", lr_args.end, "Last learning rate")->capture_default_str();
  l->add_option("--iters", lr_args.iters, "Number of iterations")->capture_default_str();
  l->add_option("--out", lr_args.out, "Output JSON file")->capture_default_str();

  auto* c = app.add_subcommand("cwt-export", "Write one viridis scalogram PNG per signal");
  c->add_option("--data", cwt_args.data, "Dataset file")->required();
  c->add_option("--out", cwt_args.out, "Output directory")->required();
  c->add_option("--omega0", cwt_args.omega0, "Morlet center frequency")->capture_default_str();

  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint on the validation split");
  e->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
  e->add_option("--data", eval_args.data, "Dataset file")->required();
  e->add_option("--out", eval_args.out, "Output report JSON")->capture_default_str();
  e->add_flag("--all", eval_args.all, "Evaluate every row instead of the validation split");
  e->add_option("--batch-size", eval_args.batch_size, "Batch size")->capture_default_str();

  auto* pr = app.add_subcommand("predict", "Predict classes for every row of a dataset file");
  pr->add_option("--checkpoint", predict_args.checkpoint, "Checkpoint file")->required();
  pr->add_option("--input", predict_args.input, "Dataset file (labels are ignored)")->required();
  pr->add_option("--out", predict_args.out, "Output predictions JSON")->capture_default_str();
  pr->add_option("--batch-size", predict_args.batch_size, "Batch size")->capture_default_str();

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->add_option("--config", config_path, "File of 'key = value' lines; flags take precedence");
  }

  try {
    // Config file entries become flags unless the flag is given explicitly.
    std::vector<std::string> args = raw_args;
    const auto cfg_it = std::find(raw_args.begin(), raw_args.end(), "--config");
    if (cfg_it != raw_args.end() && !raw_args.empty()) {
      if (cfg_it + 1 == raw_args.end()) throw UsageError("--config needs a file");
      CLI::App* sub = app.get_subcommand_no_throw(raw_args.front());
      if (sub == nullptr) throw UsageError("unknown subcommand '" + raw_args.front() + "'");
      for (const auto& [key, value] : read_config_file(*(cfg_it + 1))) {
        const std::string flag = "--" + key;
        if (key == "config" || sub->get_option_no_throw(flag) == nullptr) {
          throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
        }
        const bool given = std::any_of(raw_args.begin(), raw_args.end(), [&](const std::string& arg) {
          return arg == flag || arg.rfind(flag + "=", 0) == 0;
        });
        if (given) continue;
        if (flag == "--all") {
          if (value == "true" || value == "1") args.push_back(flag);
        } else {
          args.push_back(flag);
          args.push_back(value);
        }
      }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& err) {
    if (err.get_exit_code() == 0) {
      log << app.help();
      return kOk;
    }
    log << "usage error: " << err.what() << "\n";
    return kUsageError;
  } catch (const UsageError& err) {
    log << "usage error: " << err.what() << "\n";
    return kUsageError;
  } catch (const DataError& err) {
    log << "data error: " << err.what() << "\n";
    return kDataError;
  }

  try {
    if (s->parsed()) return cmd_synth(synth, log);
    if (t->parsed()) {
      const TrainConfig cfg = resolve_train_config(train_args);
      return dispatch_precision(cfg.precision, [&](auto tag) {
        return cmd_train<decltype(tag)>(train_args, cfg, log);
      });
    }
    if (l->parsed()) {
      return dispatch_precision(parse_precision(lr_args.precision), [&](auto tag) {
        return cmd_lr_find<decltype(tag)>(lr_args, log);
      });
    }
    if (c->parsed()) return cmd_cwt_export(cwt_args, log);
    if (e->parsed()) {
      return dispatch_precision(checkpoint_precision(eval_args.checkpoint), [&](auto tag) {
        return cmd_eval<decltype(tag)>(eval_args, log);
      });
    }
    if (pr->parsed()) {
      return dispatch_precision(checkpoint_precision(predict_args.checkpoint), [&](auto tag) {
        return cmd_predict<decltype(tag)>(predict_args, log);
      });
    }
  } catch (const ConfigError& err) {
    log << "usage error: " << err.what() << "\n";
    return kUsageError;
  } catch (const NumericError& err) {
    log << "numeric failure: " << err.what() << "\n";
    return kNumericFailure;
  } catch (const DataError& err) {
    log << "data error: " << err.what() << "\n";
    return kDataError;
  } catch (const std::exception& err) {
    log << "data error: " << err.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace infracls::cli
