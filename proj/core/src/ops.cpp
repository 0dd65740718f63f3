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

#include "infracls/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace infracls {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;
template <typename T>
using ConstVectorMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

std::string pair_message(const char* op, const Shape& a, const char* a_name, const Shape& b, const char* b_name) {
  return std::string(op) + ": " + a_name + " " + to_string(a) + " does not conform with " + b_name + " " +
         to_string(b);
}

struct ConvGeometry {
  std::size_t batch, channels, height, width;
  std::size_t filters, kh, kw;
  std::size_t stride, pad_h, pad_w;
  std::size_t out_h, out_w;

  std::size_t col_rows() const { return channels * kh * kw; }
  std::size_t col_cols() const { return out_h * out_w; }
  std::size_t in_stride() const { return channels * height * width; }
  std::size_t out_stride() const { return filters * out_h * out_w; }
  bool pointwise() const { return kh == 1 && kw == 1 && stride == 1; }
};

// Valid output column range [lo, hi) for kernel column j at stride 1.
inline void stride1_range(const ConvGeometry& g, std::size_t j, std::size_t& lo, std::size_t& hi) {
  const long shift = static_cast<long>(j) - static_cast<long>(g.pad_w);
  lo = static_cast<std::size_t>(std::max(0L, -shift));
  hi = static_cast<std::size_t>(std::clamp(static_cast<long>(g.width) - shift, 0L, static_cast<long>(g.out_w)));
  if (hi < lo) hi = lo;
}

template <typename T>
void im2col(const T* x, const ConvGeometry& g, T* col) {
  const std::size_t cols = g.col_cols();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        T* row = col + ((c * g.kh + i) * g.kw + j) * cols;
        for (std::size_t oh = 0; oh < g.out_h; ++oh) {
          T* dst = row + oh * g.out_w;
          const long ih = static_cast<long>(oh * g.stride + i) - static_cast<long>(g.pad_h);
          if (ih < 0 || ih >= static_cast<long>(g.height)) {
            std::fill(dst, dst + g.out_w, T{0});
            continue;
          }
          const T* src = x + (c * g.height + static_cast<std::size_t>(ih)) * g.width;
          if (g.stride == 1) {
            std::size_t lo, hi;
            stride1_range(g, j, lo, hi);
            std::fill(dst, dst + lo, T{0});
            std::copy(src + lo + j - g.pad_w, src + hi + j - g.pad_w, dst + lo);
            std::fill(dst + hi, dst + g.out_w, T{0});
          } else {
            for (std::size_t ow = 0; ow < g.out_w; ++ow) {
              const long iw = static_cast<long>(ow * g.stride + j) - static_cast<long>(g.pad_w);
              dst[ow] = (iw >= 0 && iw < static_cast<long>(g.width)) ? src[iw] : T{0};
            }
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const T* col, const ConvGeometry& g, T* x) {
  const std::size_t cols = g.col_cols();
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        const T* row = col + ((c * g.kh + i) * g.kw + j) * cols;
        for (std::size_t oh = 0; oh < g.out_h; ++oh) {
          const long ih = static_cast<long>(oh * g.stride + i) - static_cast<long>(g.pad_h);
          if (ih < 0 || ih >= static_cast<long>(g.height)) continue;
          const T* src = row + oh * g.out_w;
          T* dst = x + (c * g.height + static_cast<std::size_t>(ih)) * g.width;
          if (g.stride == 1) {
            std::size_t lo, hi;
            stride1_range(g, j, lo, hi);
            T* d = dst + j - g.pad_w;
            for (std::size_t ow = lo; ow < hi; ++ow) d[ow] += src[ow];
          } else {
            for (std::size_t ow = 0; ow < g.out_w; ++ow) {
              const long iw = static_cast<long>(ow * g.stride + j) - static_cast<long>(g.pad_w);
              if (iw >= 0 && iw < static_cast<long>(g.width)) dst[iw] += src[ow];
            }
          }
        }
      }
    }
  }
}

template <typename T>
Var conv_impl(Tape<T>& tape, std::string_view name, Var x, Var kernel, std::optional<Var> bias,
              const ConvGeometry& g, Shape out_shape) {
  const Tensor<T>& input = tape.value(x);
  const Tensor<T>& weights = tape.value(kernel);
  Tensor<T> out(std::move(out_shape));

  const std::size_t rows = g.col_rows();
  const std::size_t cols = g.col_cols();
  std::vector<T> col(g.pointwise() ? 0 : rows * cols);
  ConstMatrixMap<T> w(weights.raw(), static_cast<Eigen::Index>(g.filters), static_cast<Eigen::Index>(rows));
  const T* bias_data = bias ? tape.value(*bias).raw() : nullptr;

  for (std::size_t b = 0; b < g.batch; ++b) {
    const T* xb = input.raw() + b * g.in_stride();
    const T* src = xb;
    if (!g.pointwise()) {
      im2col(xb, g, col.data());
      src = col.data();
    }
    MatrixMap<T> y(out.raw() + b * g.out_stride(), static_cast<Eigen::Index>(g.filters),
                   static_cast<Eigen::Index>(cols));
    y.noalias() = w * ConstMatrixMap<T>(src, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    if (bias_data != nullptr) {
      y.colwise() += ConstVectorMap<T>(bias_data, static_cast<Eigen::Index>(g.filters));
    }
  }

  std::vector<Var> inputs{x, kernel};
  if (bias) inputs.push_back(*bias);
  return tape.record(name, std::move(out), inputs, [g, x, kernel, bias](Tape<T>& t, Var o) {
    const Tensor<T>& gy = t.grad(o);
    const Tensor<T>& input = t.value(x);
    const Tensor<T>& weights = t.value(kernel);
    const bool want_x = t.requires_grad(x);
    const bool want_k = t.requires_grad(kernel);
    const bool want_b = bias && t.requires_grad(*bias);
    const auto rows = static_cast<Eigen::Index>(g.col_rows());
    const auto cols = static_cast<Eigen::Index>(g.col_cols());
    const auto filters = static_cast<Eigen::Index>(g.filters);

    ConstMatrixMap<T> w(weights.raw(), filters, rows);
    std::vector<T> col(g.pointwise() || !want_k ? 0 : g.col_rows() * g.col_cols());
    RowMatrix<T> dcol;
    T* gx = want_x ? t.grad_buffer(x).raw() : nullptr;
    T* gk = want_k ? t.grad_buffer(kernel).raw() : nullptr;
    T* gb = want_b ? t.grad_buffer(*bias).raw() : nullptr;

    for (std::size_t b = 0; b < g.batch; ++b) {
      ConstMatrixMap<T> dy(gy.raw() + b * g.out_stride(), filters, cols);
      const T* xb = input.raw() + b * g.in_stride();
      if (want_k) {
        const T* src = xb;
        if (!g.pointwise()) {
          im2col(xb, g, col.data());
          src = col.data();
        }
        MatrixMap<T>(gk, filters, rows).noalias() += dy * ConstMatrixMap<T>(src, rows, cols).transpose();
      }
      if (want_x) {
        T* dx = gx + b * g.in_stride();
        if (g.pointwise()) {
          MatrixMap<T>(dx, rows, cols).noalias() += w.transpose() * dy;
        } else {
          dcol.noalias() = w.transpose() * dy;
          col2im_add(dcol.data(), g, dx);
        }
      }
      if (want_b) {
        // Plain loops: Eigen reductions peel by address, which breaks run-to-run bit identity.
        const T* d = gy.raw() + b * g.out_stride();
        for (Eigen::Index f = 0; f < filters; ++f) {
          T acc = 0;
          for (Eigen::Index c = 0; c < cols; ++c) acc += d[f * cols + c];
          gb[f] += acc;
        }
      }
    }
  });
}

template <typename T>
void check_bias(const Tape<T>& tape, std::optional<Var> bias, std::size_t filters, const char* op) {
  if (!bias) return;
  const Shape& bs = tape.value(*bias).shape();
  require(bs == Shape{filters}, std::string(op) + ": bias " + to_string(bs) + " must be [" +
                                    std::to_string(filters) + "]");
}

}  // namespace

template <typename T>
Var conv1d(Tape<T>& tape, Var x, Var kernel, std::optional<Var> bias) {
  const Shape& xs = tape.value(x).shape();
  const Shape& ks = tape.value(kernel).shape();
  require(xs.size() == 3 && ks.size() == 3 && ks[1] == xs[1],
          pair_message("conv1d", xs, "input", ks, "kernel"));
  require(ks[2] % 2 == 1, "conv1d: kernel length must be odd, kernel " + to_string(ks));
  check_bias(tape, bias, ks[0], "conv1d");
  ConvGeometry g{xs[0], xs[1], 1, xs[2], ks[0], 1, ks[2], 1, 0, ks[2] / 2, 1, xs[2]};
  return conv_impl(tape, "conv1d", x, kernel, bias, g, Shape{xs[0], ks[0], xs[2]});
}

template <typename T>
Var conv2d(Tape<T>& tape, Var x, Var kernel, std::optional<Var> bias, std::size_t stride) {
  const Shape& xs = tape.value(x).shape();
  const Shape& ks = tape.value(kernel).shape();
  require(xs.size() == 4 && ks.size() == 4 && ks[1] == xs[1],
          pair_message("conv2d", xs, "input", ks, "kernel"));
  require(ks[2] % 2 == 1 && ks[3] % 2 == 1, "conv2d: kernel extents must be odd, kernel " + to_string(ks));
  require(stride == 1 || stride == 2, "conv2d: stride must be 1 or 2, got " + std::to_string(stride));
  check_bias(tape, bias, ks[0], "conv2d");
  const std::size_t oh = (xs[2] + stride - 1) / stride;
  const std::size_t ow = (xs[3] + stride - 1) / stride;
  ConvGeometry g{xs[0], xs[1], xs[2], xs[3], ks[0], ks[2], ks[3], stride, ks[2] / 2, ks[3] / 2, oh, ow};
  return conv_impl(tape, "conv2d", x, kernel, bias, g, Shape{xs[0], ks[0], oh, ow});
}

template <typename T>
Var batchnorm(Tape<T>& tape, Var x, Var gamma, Var beta, Tensor<T>& running_mean, Tensor<T>& running_var,
              Mode mode, BatchNormOptions options) {
  const Tensor<T>& input = tape.value(x);
  const Shape& xs = input.shape();
  require(xs.size() >= 2, "batchnorm: input must be [B,C,...], got " + to_string(xs));
  const std::size_t batch = xs[0];
  const std::size_t channels = xs[1];
  const std::size_t spatial = input.size() / (batch * channels);
  const Shape cshape{channels};
  require(tape.value(gamma).shape() == cshape && tape.value(beta).shape() == cshape,
          pair_message("batchnorm", xs, "input", tape.value(gamma).shape(), "gamma"));
  require(running_mean.shape() == cshape && running_var.shape() == cshape,
          pair_message("batchnorm", xs, "input", running_mean.shape(), "running statistics"));
  const bool train = mode == Mode::kTrain;
  const std::size_t count = batch * spatial;
  require(!train || count >= 2, "batchnorm: train mode needs at least 2 values per channel, input " + to_string(xs));

  const T* g = tape.value(gamma).raw();
  const T* bt = tape.value(beta).raw();
  Tensor<T> xhat(xs);
  Tensor<T> out(xs);
  std::vector<T> inv_std(channels);

  for (std::size_t c = 0; c < channels; ++c) {
    double mean;
    double var;
    if (train) {
      double acc = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* p = input.raw() + (b * channels + c) * spatial;
        for (std::size_t s = 0; s < spatial; ++s) acc += p[s];
      }
      mean = acc / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* p = input.raw() + (b * channels + c) * spatial;
        for (std::size_t s = 0; s < spatial; ++s) {
          const double d = p[s] - mean;
          sq += d * d;
        }
      }
      var = sq / static_cast<double>(count);
      running_mean[c] = static_cast<T>((1.0 - options.momentum) * running_mean[c] + options.momentum * mean);
      running_var[c] = static_cast<T>((1.0 - options.momentum) * running_var[c] + options.momentum * var);
    } else {
      mean = running_mean[c];
      var = running_var[c];
    }
    const double inv = 1.0 / std::sqrt(var + options.eps);
    inv_std[c] = static_cast<T>(inv);
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * channels + c) * spatial;
      for (std::size_t s = 0; s < spatial; ++s) {
        const T h = static_cast<T>((input[off + s] - mean) * inv);
        xhat[off + s] = h;
        out[off + s] = g[c] * h + bt[c];
      }
    }
  }

  return tape.record(
      "batchnorm", std::move(out), {x, gamma, beta},
      [x, gamma, beta, train, batch, channels, spatial, xhat = std::move(xhat), inv_std = std::move(inv_std)](
          Tape<T>& t, Var o) {
        const Tensor<T>& gy = t.grad(o);
        const T* g = t.value(gamma).raw();
        const bool want_x = t.requires_grad(x);
        T* gx = want_x ? t.grad_buffer(x).raw() : nullptr;
        T* gg = t.requires_grad(gamma) ? t.grad_buffer(gamma).raw() : nullptr;
        T* gbt = t.requires_grad(beta) ? t.grad_buffer(beta).raw() : nullptr;
        const double n = static_cast<double>(batch * spatial);
        for (std::size_t c = 0; c < channels; ++c) {
          double sum_dy = 0.0;
          double sum_dy_xhat = 0.0;
          for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels + c) * spatial;
            for (std::size_t s = 0; s < spatial; ++s) {
              sum_dy += gy[off + s];
              sum_dy_xhat += static_cast<double>(gy[off + s]) * xhat[off + s];
            }
          }
          if (gbt != nullptr) gbt[c] += static_cast<T>(sum_dy);
          if (gg != nullptr) gg[c] += static_cast<T>(sum_dy_xhat);
          if (gx == nullptr) continue;
          const double k = static_cast<double>(g[c]) * inv_std[c];
          for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t off = (b * channels + c) * spatial;
            for (std::size_t s = 0; s < spatial; ++s) {
              if (train) {
                gx[off + s] += static_cast<T>(k * (gy[off + s] - sum_dy / n - xhat[off + s] * sum_dy_xhat / n));
              } else {
                gx[off + s] += static_cast<T>(k * gy[off + s]);
              }
            }
          }
        }
      });
}

template <typename T>
Var relu(Tape<T>& tape, Var x) {
  const Tensor<T>& input = tape.value(x);
  Tensor<T> out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] > T{0} ? input[i] : T{0};
  return tape.record("relu", std::move(out), {x}, [x](Tape<T>& t, Var o) {
    const Tensor<T>& gy = t.grad(o);
    const Tensor<T>& in = t.value(x);
    Tensor<T>& gx = t.grad_buffer(x);
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in[i] > T{0}) gx[i] += gy[i];
    }
  });
}

template <typename T>
Var maxpool1d(Tape<T>& tape, Var x, std::size_t kernel) {
  const Tensor<T>& input = tape.value(x);
  const Shape& xs = input.shape();
  require(xs.size() == 3, "maxpool1d: input must be [B,C,L], got " + to_string(xs));
  if (kernel % 2 == 0) throw ShapeError("maxpool1d: kernel must be odd, got " + std::to_string(kernel));
  const std::size_t rows = xs[0] * xs[1];
  const std::size_t len = xs[2];
  const long pad = static_cast<long>(kernel / 2);
  Tensor<T> out(xs);
  std::vector<std::size_t> argmax(input.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* src = input.raw() + r * len;
    for (std::size_t l = 0; l < len; ++l) {
      T best = -std::numeric_limits<T>::infinity();
      std::size_t where = l;
      for (long j = static_cast<long>(l) - pad; j <= static_cast<long>(l) + pad; ++j) {
        if (j < 0 || j >= static_cast<long>(len)) continue;
        if (src[j] > best) {
          best = src[j];
          where = static_cast<std::size_t>(j);
        }
      }
      out[r * len + l] = best;
      argmax[r * len + l] = r * len + where;
    }
  }
  return tape.record("maxpool1d", std::move(out), {x}, [x, argmax = std::move(argmax)](Tape<T>& t, Var o) {
    const Tensor<T>& gy = t.grad(o);
    Tensor<T>& gx = t.grad_buffer(x);
    for (std::size_t i = 0; i < argmax.size(); ++i) gx[argmax[i]] += gy[i];
  });
}

template <typename T>
Var global_avg_pool(Tape<T>& tape, Var x) {
  const Tensor<T>& input = tape.value(x);
  const Shape& xs = input.shape();
  require(xs.size() >= 3, "global_avg_pool: input must be [B,C,...], got " + to_string(xs));
  const std::size_t rows = xs[0] * xs[1];
  const std::size_t spatial = input.size() / rows;
  Tensor<T> out(Shape{xs[0], xs[1]});
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t s = 0; s < spatial; ++s) acc += input[r * spatial + s];
    out[r] = static_cast<T>(acc / static_cast<double>(spatial));
  }
  return tape.record("global_avg_pool", std::move(out), {x}, [x, rows, spatial](Tape<T>& t, Var o) {
    const Tensor<T>& gy = t.grad(o);
    Tensor<T>& gx = t.grad_buffer(x);
    const T inv = T{1} / static_cast<T>(spatial);
    for (std::size_t r = 0; r < rows; ++r) {
      const T v = gy[r] * inv;
      for (std::size_t s = 0; s < spatial; ++s) gx[r * spatial + s] += v;
    }
  });
}

template <typename T>
Var linear(Tape<T>& tape, Var x, Var weight, std::optional<Var> bias) {
  const Shape& xs = tape.value(x).shape();
  const Shape& ws = tape.value(weight).shape();
  require(xs.size() == 2 && ws.size() == 2 && xs[1] == ws[1], pair_message("linear", xs, "input", ws, "weight"));
  check_bias(tape, bias, ws[0], "linear");
  const auto batch = static_cast<Eigen::Index>(xs[0]);
  const auto n_in = static_cast<Eigen::Index>(xs[1]);
  const auto n_out = static_cast<Eigen::Index>(ws[0]);
  Tensor<T> out(Shape{xs[0], ws[0]});
  MatrixMap<T> y(out.raw(), batch, n_out);
  y.noalias() = ConstMatrixMap<T>(tape.value(x).raw(), batch, n_in) *
                ConstMatrixMap<T>(tape.value(weight).raw(), n_out, n_in).transpose();
  if (bias) y.rowwise() += ConstVectorMap<T>(tape.value(*bias).raw(), n_out).transpose();

  std::vector<Var> inputs{x, weight};
  if (bias) inputs.push_back(*bias);
  return tape.record("linear", std::move(out), inputs, [x, weight, bias, batch, n_in, n_out](Tape<T>& t, Var o) {
    ConstMatrixMap<T> dy(t.grad(o).raw(), batch, n_out);
    if (t.requires_grad(x)) {
      MatrixMap<T>(t.grad_buffer(x).raw(), batch, n_in).noalias() +=
          dy * ConstMatrixMap<T>(t.value(weight).raw(), n_out, n_in);
    }
    if (t.requires_grad(weight)) {
      MatrixMap<T>(t.grad_buffer(weight).raw(), n_out, n_in).noalias() +=
          dy.transpose() * ConstMatrixMap<T>(t.value(x).raw(), batch, n_in);
    }
    if (bias && t.requires_grad(*bias)) {
      T* gb = t.grad_buffer(*bias).raw();
      const T* d = t.grad(o).raw();
      for (Eigen::Index r = 0; r < batch; ++r) {
        for (Eigen::Index k = 0; k < n_out; ++k) gb[k] += d[r * n_out + k];
      }
    }
  });
}

template <typename T>
Var add(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& va = tape.value(a);
  const Tensor<T>& vb = tape.value(b);
  require(va.shape() == vb.shape(), pair_message("add", va.shape(), "lhs", vb.shape(), "rhs"));
  Tensor<T> out(va.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = va[i] + vb[i];
  return tape.record("add", std::move(out), {a, b}, [a, b](Tape<T>& t, Var o) {
    const Tensor<T>& gy = t.grad(o);
    for (Var in : {a, b}) {
      if (!t.requires_grad(in)) continue;
      Tensor<T>& g = t.grad_buffer(in);
      for (std::size_t i = 0; i < gy.size(); ++i) g[i] += gy[i];
    }
  });
}

template <typename T>
Var mul(Tape<T>& tape, Var a, Var b) {
  const Tensor<T>& va = tape.value(a);
  const Tensor<T>& vb = tape.value(b);
  require(va.shape() == vb.shape(), pair_message("mul", va.shape(), "lhs", vb.shape(), "rhs"));
  Tensor<T> out(va.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = va[i] * vb[i];
  return tape.record("mul", std::move(out), {a, b}, [a, b](Tape<T>& t, Var o) {
    const Tensor<T>& gy = t.grad(o);
    const Tensor<T>& va = t.value(a);
    const Tensor<T>& vb = t.value(b);
    if (t.requires_grad(a)) {
      Tensor<T>& g = t.grad_buffer(a);
      for (std::size_t i = 0; i < gy.size(); ++i) g[i] += gy[i] * vb[i];
    }
    if (t.requires_grad(b)) {
      Tensor<T>& g = t.grad_buffer(b);
      for (std::size_t i = 0; i < gy.size(); ++i) g[i] += gy[i] * va[i];
    }
  });
}

template <typename T>
Var scale(Tape<T>& tape, Var x, T factor) {
  const Tensor<T>& in = tape.value(x);
  Tensor<T> out(in.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] * factor;
  return tape.record("scale", std::move(out), {x}, [x, factor](Tape<T>& t, Var o) {
    const Tensor<T>& gy = t.grad(o);
    Tensor<T>& g = t.grad_buffer(x);
    for (std::size_t i = 0; i < gy.size(); ++i) g[i] += gy[i] * factor;
  });
}

template <typename T>
Var sum(Tape<T>& tape, Var x) {
  double acc = 0.0;
  for (T v : tape.value(x).data()) acc += v;
  return tape.record("sum", Tensor<T>(Shape{1}, static_cast<T>(acc)), {x}, [x](Tape<T>& t, Var o) {
    const T gy = t.grad(o)[0];
    Tensor<T>& g = t.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy;
  });
}

template <typename T>
Var concat_channels(Tape<T>& tape, const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_channels: no inputs");
  const Shape& first = tape.value(parts.front()).shape();
  require(first.size() >= 2, "concat_channels: inputs must be [B,C,...], got " + to_string(first));
  const std::size_t batch = first[0];
  const std::size_t spatial = tape.value(parts.front()).size() / (first[0] * first[1]);
  std::size_t total = 0;
  for (Var p : parts) {
    const Shape& s = tape.value(p).shape();
    require(s.size() == first.size() && s[0] == first[0] && std::equal(s.begin() + 2, s.end(), first.begin() + 2),
            pair_message("concat_channels", s, "input", first, "first input"));
    total += s[1];
  }
  Shape out_shape = first;
  out_shape[1] = total;
  Tensor<T> out(out_shape);
  std::vector<std::size_t> widths;
  for (std::size_t b = 0; b < batch; ++b) {
    std::size_t offset = 0;
    for (Var p : parts) {
      const Tensor<T>& v = tape.value(p);
      const std::size_t block = v.dim(1) * spatial;
      std::copy_n(v.raw() + b * block, block, out.raw() + (b * total * spatial) + offset);
      offset += block;
    }
  }
  for (Var p : parts) widths.push_back(tape.value(p).dim(1));
  return tape.record("concat_channels", std::move(out), parts,
                     [parts, widths, batch, spatial, total](Tape<T>& t, Var o) {
                       const Tensor<T>& gy = t.grad(o);
                       std::size_t offset = 0;
                       for (std::size_t k = 0; k < parts.size(); ++k) {
                         const std::size_t block = widths[k] * spatial;
                         if (t.requires_grad(parts[k])) {
                           Tensor<T>& g = t.grad_buffer(parts[k]);
                           for (std::size_t b = 0; b < batch; ++b) {
                             const T* src = gy.raw() + b * total * spatial + offset;
                             T* dst = g.raw() + b * block;
                             for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
                           }
                         }
                         offset += block;
                       }
                     });
}

template <typename T>
CrossEntropyResult<T> softmax_cross_entropy(Tape<T>& tape, Var logits, std::span<const int> labels) {
  const Tensor<T>& z = tape.value(logits);
  require(z.rank() == 2 && z.dim(0) == labels.size(),
          "softmax_cross_entropy: logits " + to_string(z.shape()) + " do not match " + std::to_string(labels.size()) +
              " labels");
  const std::size_t batch = z.dim(0);
  const std::size_t classes = z.dim(1);
  Tensor<T> probs(z.shape());
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const int label = labels[b];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw std::out_of_range("softmax_cross_entropy: label " + std::to_string(label) + " at row " +
                              std::to_string(b) + " outside [0," + std::to_string(classes) + ")");
    }
    const T* row = z.raw() + b * classes;
    const double m = *std::max_element(row, row + classes);
    double s = 0.0;
    for (std::size_t k = 0; k < classes; ++k) s += std::exp(row[k] - m);
    for (std::size_t k = 0; k < classes; ++k) probs[b * classes + k] = static_cast<T>(std::exp(row[k] - m) / s);
    total -= (row[label] - m) - std::log(s);
  }
  std::vector<int> owned(labels.begin(), labels.end());
  Tensor<T> loss(Shape{1}, static_cast<T>(total / static_cast<double>(batch)));
  Var out = tape.record("softmax_cross_entropy", std::move(loss), {logits},
                        [logits, probs, owned = std::move(owned), batch, classes](Tape<T>& t, Var o) {
                          const double g = t.grad(o)[0] / static_cast<double>(batch);
                          Tensor<T>& gz = t.grad_buffer(logits);
                          for (std::size_t b = 0; b < batch; ++b) {
                            for (std::size_t k = 0; k < classes; ++k) {
                              const double target = static_cast<int>(k) == owned[b] ? 1.0 : 0.0;
                              gz[b * classes + k] += static_cast<T>(g * (probs[b * classes + k] - target));
                            }
                          }
                        });
  return {out, std::move(probs)};
}

#define INFRACLS_INSTANTIATE_OPS(T)                                                                          \
  template Var conv1d<T>(Tape<T>&, Var, Var, std::optional<Var>);                                            \
  template Var conv2d<T>(Tape<T>&, Var, Var, std::optional<Var>, std::size_t);                               \
  template Var batchnorm<T>(Tape<T>&, Var, Var, Var, Tensor<T>&, Tensor<T>&, Mode, BatchNormOptions);        \
  template Var relu<T>(Tape<T>&, Var);                                                                       \
  template Var maxpool1d<T>(Tape<T>&, Var, std::size_t);                                                     \
  template Var global_avg_pool<T>(Tape<T>&, Var);                                                            \
  template Var linear<T>(Tape<T>&, Var, Var, std::optional<Var>);                                            \
  template Var add<T>(Tape<T>&, Var, Var);                                                                   \
  template Var mul<T>(Tape<T>&, Var, Var);                                                                   \
  template Var scale<T>(Tape<T>&, Var, T);                                                                   \
  template Var sum<T>(Tape<T>&, Var);                                                                        \
  template Var concat_channels<T>(Tape<T>&, const std::vector<Var>&);                                        \
  template CrossEntropyResult<T> softmax_cross_entropy<T>(Tape<T>&, Var, std::span<const int>);

INFRACLS_INSTANTIATE_OPS(float)
INFRACLS_INSTANTIATE_OPS(double)

#undef INFRACLS_INSTANTIATE_OPS

}  // namespace infracls
