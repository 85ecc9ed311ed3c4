/*
 * Copyright 2026 The Fairgrid Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fairgrid/nn/layers.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairgrid/numerics/kernels.h"
#include "fmt/format.h"

namespace fairgrid::nn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

kernels::ConvGeometry geometry(const Conv& layer, std::size_t batch,
                               const Shape& in) {
  kernels::ConvGeometry g;
  g.batch = batch;
  g.in_channels = in.c;
  g.in_height = in.h;
  g.in_width = in.w;
  g.out_channels = layer.out_channels;
  g.kernel_height = layer.kernel_h;
  g.kernel_width = layer.kernel_w;
  g.stride = layer.stride;
  g.cross_correlation = layer.cross_correlation;
  return g;
}

void expect_size(const std::vector<double>& v, std::size_t n,
                 const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(
        fmt::format("{} has {} values, expected {}", what, v.size(), n));
  }
}

}  // namespace

Conv make_conv(std::size_t in_channels, std::size_t out_channels,
               std::size_t kernel_h, std::size_t kernel_w, std::size_t stride) {
  Conv c;
  c.in_channels = in_channels;
  c.out_channels = out_channels;
  c.kernel_h = kernel_h;
  c.kernel_w = kernel_w;
  c.stride = stride;
  c.kernel.assign(out_channels * in_channels * kernel_h * kernel_w, 0.0);
  c.bias.assign(out_channels, 0.0);
  return c;
}

Dense make_dense(std::size_t in, std::size_t out) {
  Dense d;
  d.in = in;
  d.out = out;
  d.weight.assign(in * out, 0.0);
  d.bias.assign(out, 0.0);
  return d;
}

BatchNorm make_batchnorm(std::size_t channels) {
  BatchNorm bn;
  bn.channels = channels;
  bn.gamma.assign(channels, 1.0);
  bn.beta.assign(channels, 0.0);
  bn.running_mean.assign(channels, 0.0);
  bn.running_var.assign(channels, 1.0);
  return bn;
}

std::string layer_name(const Layer& layer) {
  return std::visit(
      Overloaded{[](const Conv&) { return "conv"; },
                 [](const Relu&) { return "relu"; },
                 [](const MaxPool&) { return "maxpool"; },
                 [](const Flatten&) { return "flatten"; },
                 [](const Dense&) { return "dense"; },
                 [](const Dropout&) { return "dropout"; },
                 [](const BatchNorm&) { return "batchnorm"; },
                 [](const Sigmoid&) { return "sigmoid"; }},
      layer);
}

Shape output_shape(const Layer& layer, const Shape& in) {
  return std::visit(
      Overloaded{
          [&](const Conv& c) {
            if (c.in_channels != in.c) {
              throw std::invalid_argument(fmt::format(
                  "conv expects {} input channels, got {}", c.in_channels, in.c));
            }
            if (c.kernel_h == 0 || c.kernel_w == 0 || c.stride == 0 ||
                c.kernel_h > in.h || c.kernel_w > in.w) {
              throw std::invalid_argument(fmt::format(
                  "conv kernel {}x{} (stride {}) does not fit input {}",
                  c.kernel_h, c.kernel_w, c.stride, in.str()));
            }
            expect_size(c.kernel, c.out_channels * c.in_channels * c.kernel_h * c.kernel_w,
                        "conv kernel");
            expect_size(c.bias, c.out_channels, "conv bias");
            return Shape{c.out_channels, (in.h - c.kernel_h) / c.stride + 1,
                         (in.w - c.kernel_w) / c.stride + 1};
          },
          [&](const Relu&) { return in; },
          [&](const MaxPool& p) {
            if (p.window == 0 || p.stride == 0 || p.window > in.h || p.window > in.w) {
              throw std::invalid_argument(fmt::format(
                  "maxpool window {} does not fit input {}", p.window, in.str()));
            }
            return Shape{in.c, (in.h - p.window) / p.stride + 1,
                         (in.w - p.window) / p.stride + 1};
          },
          [&](const Flatten&) { return Shape{in.size(), 1, 1}; },
          [&](const Dense& d) {
            if (d.in != in.size()) {
              throw std::invalid_argument(fmt::format(
                  "dense expects {} inputs, got {} ({})", d.in, in.size(), in.str()));
            }
            expect_size(d.weight, d.in * d.out, "dense weight");
            expect_size(d.bias, d.out, "dense bias");
            return Shape{d.out, 1, 1};
          },
          [&](const Dropout& d) {
            if (!(d.rate >= 0.0 && d.rate < 1.0)) {
              throw std::invalid_argument(
                  fmt::format("dropout rate {} outside [0, 1)", d.rate));
            }
            return in;
          },
          [&](const BatchNorm& bn) {
            if (bn.channels != in.c) {
              throw std::invalid_argument(fmt::format(
                  "batchnorm expects {} channels, got {}", bn.channels, in.c));
            }
            if (!(bn.epsilon > 0.0)) {
              throw std::invalid_argument("batchnorm epsilon must be positive");
            }
            expect_size(bn.gamma, bn.channels, "batchnorm gamma");
            expect_size(bn.beta, bn.channels, "batchnorm beta");
            expect_size(bn.running_mean, bn.channels, "batchnorm running mean");
            expect_size(bn.running_var, bn.channels, "batchnorm running var");
            return in;
          },
          [&](const Sigmoid&) { return in; }},
      layer);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_loss(int y, double o) {
  if (y != 0 && y != 1) {
    throw std::invalid_argument(fmt::format("bce label must be 0 or 1, got {}", y));
  }
  return y == 1 ? -std::log(std::max(o, kBceEpsilon))
                : -std::log(std::max(1.0 - o, kBceEpsilon));
}

Tensor conv_forward(const Tensor& input, const Conv& layer) {
  const Shape out_shape = output_shape(layer, input.shape());
  Tensor out(input.batch(), out_shape);
  kernels::parallel::conv2d_forward(geometry(layer, input.batch(), input.shape()),
                                    input.data(), layer.kernel, layer.bias,
                                    out.data());
  return out;
}

Tensor relu_forward(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = relu(v);
  return out;
}

PoolResult maxpool_forward(const Tensor& input, std::size_t window,
                           std::size_t stride) {
  const Shape& in = input.shape();
  const Shape os = output_shape(MaxPool{window, stride}, in);
  PoolResult r{Tensor(input.batch(), os), std::vector<std::size_t>()};
  r.argmax.resize(r.output.size());
  std::size_t o = 0;
  for (std::size_t b = 0; b < input.batch(); ++b) {
    for (std::size_t c = 0; c < in.c; ++c) {
      const std::size_t base = (b * in.c + c) * in.h * in.w;
      for (std::size_t i = 0; i < os.h; ++i) {
        for (std::size_t j = 0; j < os.w; ++j, ++o) {
          std::size_t best = base + (i * stride) * in.w + j * stride;
          for (std::size_t m = 0; m < window; ++m) {
            for (std::size_t n = 0; n < window; ++n) {
              const std::size_t idx = base + (i * stride + m) * in.w + j * stride + n;
              if (input.data()[idx] > input.data()[best]) best = idx;
            }
          }
          r.output.data()[o] = input.data()[best];
          r.argmax[o] = best;
        }
      }
    }
  }
  return r;
}

Tensor dense_forward(const Tensor& input, const Dense& layer) {
  const Shape os = output_shape(layer, input.shape());
  Tensor out(input.batch(), os);
  kernels::parallel::dense_forward(input.batch(), layer.in, layer.out,
                                   input.data(), layer.weight, layer.bias,
                                   out.data());
  return out;
}

Tensor sigmoid_forward(const Tensor& input) {
  Tensor out = input;
  for (double& v : out.data()) v = sigmoid(v);
  return out;
}

Tensor dropout_forward(const Tensor& input, double rate, Mode mode, Rng* rng,
                       std::vector<double>* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument(fmt::format("dropout rate {} outside [0, 1)", rate));
  }
  if (mode == Mode::kInference || rate == 0.0) {
    if (mask) mask->assign(input.size(), 1.0);
    return input;
  }
  if (rng == nullptr) {
    throw std::invalid_argument("training-mode dropout needs a random generator");
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor out = input;
  std::vector<double> local;
  std::vector<double>& m = mask ? *mask : local;
  m.resize(input.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    m[i] = uniform(*rng) < rate ? 0.0 : keep_scale;
    out.data()[i] *= m[i];
  }
  return out;
}

Tensor batchnorm_forward(const Tensor& input, const BatchNorm& layer, Mode mode,
                         BatchNormCache* cache) {
  output_shape(layer, input.shape());
  const Shape& s = input.shape();
  const std::size_t plane = s.h * s.w;
  const std::size_t count = input.batch() * plane;
  std::vector<double> mean(s.c), var(s.c);
  if (mode == Mode::kTraining) {
    if (input.batch() < 2) {
      throw std::invalid_argument(fmt::format(
          "training-mode batchnorm needs a batch of at least 2, got {}",
          input.batch()));
    }
    for (std::size_t c = 0; c < s.c; ++c) {
      double sum = 0.0;
      for (std::size_t b = 0; b < input.batch(); ++b)
        for (std::size_t k = 0; k < plane; ++k)
          sum += input.data()[(b * s.c + c) * plane + k];
      mean[c] = sum / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t b = 0; b < input.batch(); ++b) {
        for (std::size_t k = 0; k < plane; ++k) {
          const double d = input.data()[(b * s.c + c) * plane + k] - mean[c];
          sq += d * d;
        }
      }
      var[c] = sq / static_cast<double>(count);
    }
  } else {
    mean = layer.running_mean;
    var = layer.running_var;
  }
  Tensor normalized(input.batch(), s);
  Tensor out(input.batch(), s);
  for (std::size_t b = 0; b < input.batch(); ++b) {
    for (std::size_t c = 0; c < s.c; ++c) {
      const double inv_std = 1.0 / std::sqrt(var[c] + layer.epsilon);
      for (std::size_t k = 0; k < plane; ++k) {
        const std::size_t idx = (b * s.c + c) * plane + k;
        const double xhat = (input.data()[idx] - mean[c]) * inv_std;
        normalized.data()[idx] = xhat;
        out.data()[idx] = layer.gamma[c] * xhat + layer.beta[c];
      }
    }
  }
  if (cache) {
    cache->mean = std::move(mean);
    cache->var = std::move(var);
    cache->normalized = std::move(normalized);
  }
  return out;
}

void update_running_stats(BatchNorm& layer, const BatchNormCache& cache) {
  for (std::size_t c = 0; c < layer.channels; ++c) {
    layer.running_mean[c] = (1.0 - layer.momentum) * layer.running_mean[c] +
                            layer.momentum * cache.mean[c];
    layer.running_var[c] = (1.0 - layer.momentum) * layer.running_var[c] +
                           layer.momentum * cache.var[c];
  }
}

}  // namespace fairgrid::nn
