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

#include "infracls/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "infracls/random.hpp"

namespace infracls {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Draws either a uniform value in [lo, hi) or, for prototypes, the midpoint.
class ParamSource {
 public:
  explicit ParamSource(SplitMix64* rng) : rng_(rng) {}
  double operator()(double lo, double hi) { return rng_ != nullptr ? rng_->uniform(lo, hi) : 0.5 * (lo + hi); }
  double phase() { return rng_ != nullptr ? rng_->uniform(0.0, kTwoPi) : 0.0; }

 private:
  SplitMix64* rng_;
};

// Waveform families at unit amplitude. t is the sample index, n the signal
// length; positions and widths scale with n, frequencies are in cycles/sample.
std::vector<double> waveform(int cls, std::size_t length, ParamSource& draw) {
  const double n = static_cast<double>(length);
  std::vector<double> x(length, 0.0);
  constexpr double amp = 1.0;
  switch (cls) {
    case 0: {  // N-wave: jump to +A, linear fall to -A, jump back to 0
      const double dur = draw(0.16, 0.30) * n;
      const double start = draw(0.1 * n, 0.9 * n - dur);
      for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i) - start;
        if (t >= 0.0 && t < dur) x[i] = amp * (1.0 - 2.0 * t / dur);
      }
      break;
    }
    case 1: {  // Gaussian-enveloped low-frequency tone
      const double center = draw(0.35, 0.65) * n;
      const double width = draw(0.14, 0.22) * n;
      const double freq = draw(0.055, 0.075);
      const double phase = draw.phase();
      for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i) - center;
        x[i] = amp * std::exp(-t * t / (2.0 * width * width)) * std::sin(kTwoPi * freq * t + phase);
      }
      break;
    }
    case 2:    // up-chirp
    case 3: {  // down-chirp; the bands overlap, so a few sweeps are flat or reversed
      const double low = draw(0.04, 0.10);
      const double high = draw(0.08, 0.22);
      const double f0 = cls == 2 ? low : high;
      const double f1 = cls == 2 ? high : low;
      const double phase = draw.phase();
      for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i);
        x[i] = amp * std::sin(kTwoPi * (f0 * t + (f1 - f0) * t * t / (2.0 * (n - 1.0))) + phase);
      }
      break;
    }
    case 4: {  // damped harmonic oscillation starting at onset
      const double onset = draw(0.05, 0.40) * n;
      const double decay = draw(0.10, 0.20) * n;
      const double freq = draw(0.08, 0.14);
      const double phase = draw.phase();
      for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i) - onset;
        if (t >= 0.0) x[i] = amp * std::exp(-t / decay) * std::sin(kTwoPi * freq * t + phase);
      }
      break;
    }
    case 5: {  // two close tones beating
      const double f1 = draw(0.10, 0.14);
      const double f2 = f1 + draw(0.02, 0.035);
      const double p1 = draw.phase();
      const double p2 = draw.phase();
      for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i);
        x[i] = 0.5 * amp * (std::sin(kTwoPi * f1 * t + p1) + std::sin(kTwoPi * f2 * t + p2));
      }
      break;
    }
    case 6: {  // band-limited noise burst: random tones in [0.2, 0.4) under a Gaussian window
      const double center = draw(0.3, 0.7) * n;
      const double width = draw(0.08, 0.14) * n;
      constexpr int kTones = 6;
      double freqs[kTones];
      double phases[kTones];
      for (int j = 0; j < kTones; ++j) {
        freqs[j] = draw(0.2, 0.4);
        phases[j] = draw.phase() + j;  // distinct prototype phases
      }
      for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i);
        double band = 0.0;
        for (int j = 0; j < kTones; ++j) band += std::sin(kTwoPi * freqs[j] * t + phases[j]);
        const double d = t - center;
        x[i] = amp * std::exp(-d * d / (2.0 * width * width)) * band / std::sqrt(kTones / 2.0);
      }
      break;
    }
    case 7: {  // amplitude-modulated carrier
      const double carrier = draw(0.25, 0.35);
      const double mod = draw(0.015, 0.03);
      const double depth = draw(0.5, 0.9);
      const double pc = draw.phase();
      const double pm = draw.phase();
      for (std::size_t i = 0; i < length; ++i) {
        const double t = static_cast<double>(i);
        x[i] = amp * (1.0 + depth * std::sin(kTwoPi * mod * t + pm)) * std::sin(kTwoPi * carrier * t + pc) / 1.5;
      }
      break;
    }
    default:
      throw ConfigError("synth: class " + std::to_string(cls) + " outside [0,8)");
  }
  return x;
}

// Draws the target RMS first, then rescales the waveform to it.
std::vector<double> clean_signal(int cls, std::size_t length, ParamSource& draw) {
  const double target = draw(0.45, 1.15);
  std::vector<double> x = waveform(cls, length, draw);
  double sq = 0.0;
  for (double v : x) sq += v * v;
  const double rms = std::sqrt(sq / static_cast<double>(length));
  if (rms > 0.0) {
    for (double& v : x) v *= target / rms;
  }
  return x;
}

}  // namespace

std::string_view class_name(int cls) {
  static constexpr std::string_view kNames[] = {"n_wave",          "gaussian_tone", "up_chirp",
                                                "down_chirp",      "damped_harmonic", "dual_tone_beat",
                                                "noise_burst",     "am_oscillation"};
  if (cls < 0 || cls >= static_cast<int>(kNumClasses)) throw ConfigError("class " + std::to_string(cls) + " outside [0,8)");
  return kNames[cls];
}

std::vector<double> synth_signal(int cls, std::size_t length, std::uint64_t stream_seed, double noise) {
  if (length < 2) throw ConfigError("synth: length must be at least 2");
  if (!(noise >= 0.0)) throw ConfigError("synth: noise must be non-negative");
  SplitMix64 rng(stream_seed);
  ParamSource draw(&rng);
  std::vector<double> x = clean_signal(cls, length, draw);
  if (noise > 0.0) {
    double sq = 0.0;
    for (double v : x) sq += v * v;
    const double sigma = noise * std::sqrt(sq / static_cast<double>(length));
    for (double& v : x) v += sigma * rng.normal();
  }
  return x;
}

std::vector<double> class_prototype(int cls, std::size_t length) {
  ParamSource mid(nullptr);
  return clean_signal(cls, length, mid);
}

SignalDataset generate(const SynthConfig& cfg) {
  if (cfg.n == 0 || cfg.n % kNumClasses != 0) {
    throw ConfigError("synth: n must be a positive multiple of " + std::to_string(kNumClasses) + ", got " +
                      std::to_string(cfg.n));
  }
  SignalDataset ds;
  ds.length = cfg.length;
  ds.source = "synthetic";
  ds.signals.reserve(cfg.n * cfg.length);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const int cls = static_cast<int>(i % kNumClasses);
    const auto x = synth_signal(cls, cfg.length, mix_seed(cfg.seed, i), cfg.noise);
    ds.signals.insert(ds.signals.end(), x.begin(), x.end());
    ds.labels.push_back(cls);
  }
  return ds;
}

}  // namespace infracls
