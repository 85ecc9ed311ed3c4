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

#include "fairgrid/numerics/kernels.h"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <vector>

namespace fairgrid::kernels {

namespace {

// Input row/column feeding tap (m, n) of output position (i, j).
inline std::size_t tap_row(const ConvGeometry& g, std::size_t i,
                           std::size_t m) {
  return g.cross_correlation ? i * g.stride + m
                             : i * g.stride + g.kernel_height - 1 - m;
}

inline std::size_t tap_col(const ConvGeometry& g, std::size_t j,
                           std::size_t n) {
  return g.cross_correlation ? j * g.stride + n
                             : j * g.stride + g.kernel_width - 1 - n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Serial reference kernels: textbook loop nests, one output at a time.
// ---------------------------------------------------------------------------

namespace serial {

void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> c, std::size_t m, std::size_t k, std::size_t n) {
  assert(a.size() == m * k && b.size() == k * n && c.size() == m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = acc;
    }
  }
}

void conv2d_forward(const ConvGeometry& g, std::span<const double> input,
                    std::span<const double> kernel,
                    std::span<const double> bias, std::span<double> output) {
  assert(input.size() == g.input_size() && kernel.size() == g.kernel_size());
  assert(bias.size() == g.out_channels && output.size() == g.output_size());
  const std::size_t oh = g.out_height(), ow = g.out_width();
  const std::size_t kh = g.kernel_height, kw = g.kernel_width;
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          double acc = 0.0;
          for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
            for (std::size_t m = 0; m < kh; ++m) {
              for (std::size_t n = 0; n < kw; ++n) {
                const double x =
                    input[((b * g.in_channels + ic) * g.in_height +
                           tap_row(g, i, m)) *
                              g.in_width +
                          tap_col(g, j, n)];
                acc += x * kernel[((oc * g.in_channels + ic) * kh + m) * kw + n];
              }
            }
          }
          output[((b * g.out_channels + oc) * oh + i) * ow + j] =
              acc + bias[oc];
        }
      }
    }
  }
}

void conv2d_backward(const ConvGeometry& g, std::span<const double> input,
                     std::span<const double> kernel,
                     std::span<const double> grad_output,
                     std::span<double> grad_input,
                     std::span<double> grad_kernel,
                     std::span<double> grad_bias) {
  assert(grad_output.size() == g.output_size());
  assert(grad_input.size() == g.input_size());
  assert(grad_kernel.size() == g.kernel_size());
  assert(grad_bias.size() == g.out_channels);
  const std::size_t oh = g.out_height(), ow = g.out_width();
  const std::size_t kh = g.kernel_height, kw = g.kernel_width;
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  std::fill(grad_kernel.begin(), grad_kernel.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  for (std::size_t b = 0; b < g.batch; ++b) {
    for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          const double d = grad_output[((b * g.out_channels + oc) * oh + i) * ow + j];
          grad_bias[oc] += d;
          for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
            for (std::size_t m = 0; m < kh; ++m) {
              for (std::size_t n = 0; n < kw; ++n) {
                const std::size_t in_idx =
                    ((b * g.in_channels + ic) * g.in_height + tap_row(g, i, m)) *
                        g.in_width +
                    tap_col(g, j, n);
                const std::size_t k_idx =
                    ((oc * g.in_channels + ic) * kh + m) * kw + n;
                grad_kernel[k_idx] += d * input[in_idx];
                grad_input[in_idx] += d * kernel[k_idx];
              }
            }
          }
        }
      }
    }
  }
}

void dense_forward(std::size_t batch, std::size_t in, std::size_t out,
                   std::span<const double> input,
                   std::span<const double> weight,
                   std::span<const double> bias, std::span<double> output) {
  assert(input.size() == batch * in && weight.size() == out * in);
  assert(bias.size() == out && output.size() == batch * out);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < in; ++i) acc += weight[o * in + i] * input[b * in + i];
      output[b * out + o] = acc + bias[o];
    }
  }
}

void dense_backward(std::size_t batch, std::size_t in, std::size_t out,
                    std::span<const double> input,
                    std::span<const double> weight,
                    std::span<const double> grad_output,
                    std::span<double> grad_input,
                    std::span<double> grad_weight,
                    std::span<double> grad_bias) {
  assert(grad_output.size() == batch * out && grad_input.size() == batch * in);
  assert(grad_weight.size() == out * in && grad_bias.size() == out);
  std::fill(grad_input.begin(), grad_input.end(), 0.0);
  std::fill(grad_weight.begin(), grad_weight.end(), 0.0);
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t o = 0; o < out; ++o) {
      const double d = grad_output[b * out + o];
      grad_bias[o] += d;
      for (std::size_t i = 0; i < in; ++i) {
        grad_weight[o * in + i] += d * input[b * in + i];
        grad_input[b * in + i] += d * weight[o * in + i];
      }
    }
  }
}

}  // namespace serial

// ---------------------------------------------------------------------------
// OpenMP kernels. Work is split over independent output planes/rows and every
// output keeps the reference accumulation order.
// ---------------------------------------------------------------------------

namespace parallel {

void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> c, std::size_t m, std::size_t k, std::size_t n) {
  assert(a.size() == m * k && b.size() == k * n && c.size() == m * n);
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* crow = c.data() + i * n;
    std::fill(crow, crow + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void conv2d_forward(const ConvGeometry& g, std::span<const double> input,
                    std::span<const double> kernel,
                    std::span<const double> bias, std::span<double> output) {
  assert(input.size() == g.input_size() && kernel.size() == g.kernel_size());
  assert(bias.size() == g.out_channels && output.size() == g.output_size());
  const std::size_t oh = g.out_height(), ow = g.out_width();
  const std::size_t kh = g.kernel_height, kw = g.kernel_width;
  const std::size_t plane = g.in_height * g.in_width;
  const auto planes = static_cast<std::int64_t>(g.batch * g.out_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t pp = 0; pp < planes; ++pp) {
    const std::size_t b = static_cast<std::size_t>(pp) / g.out_channels;
    const std::size_t oc = static_cast<std::size_t>(pp) % g.out_channels;
    double* out = output.data() + static_cast<std::size_t>(pp) * oh * ow;
    std::fill(out, out + oh * ow, 0.0);
    for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
      const double* in = input.data() + (b * g.in_channels + ic) * plane;
      const double* kern = kernel.data() + (oc * g.in_channels + ic) * kh * kw;
      for (std::size_t i = 0; i < oh; ++i) {
        double* orow = out + i * ow;
        for (std::size_t m = 0; m < kh; ++m) {
          const double* irow = in + tap_row(g, i, m) * g.in_width;
          for (std::size_t n = 0; n < kw; ++n) {
            const double kv = kern[m * kw + n];
            const std::size_t c0 = tap_col(g, 0, n);
            if (g.stride == 1) {
              for (std::size_t j = 0; j < ow; ++j) orow[j] += irow[c0 + j] * kv;
            } else {
              for (std::size_t j = 0; j < ow; ++j)
                orow[j] += irow[c0 + j * g.stride] * kv;
            }
          }
        }
      }
    }
    const double bv = bias[oc];
    for (std::size_t t = 0; t < oh * ow; ++t) out[t] += bv;
  }
}

void conv2d_backward(const ConvGeometry& g, std::span<const double> input,
                     std::span<const double> kernel,
                     std::span<const double> grad_output,
                     std::span<double> grad_input,
                     std::span<double> grad_kernel,
                     std::span<double> grad_bias) {
  assert(grad_output.size() == g.output_size());
  assert(grad_input.size() == g.input_size());
  assert(grad_kernel.size() == g.kernel_size());
  assert(grad_bias.size() == g.out_channels);
  const std::size_t oh = g.out_height(), ow = g.out_width();
  const std::size_t kh = g.kernel_height, kw = g.kernel_width;
  const std::size_t plane = g.in_height * g.in_width;

  // Kernel and bias gradients: one output channel per task, summed over
  // (batch, i, j) in reference order.
  const auto out_channels = static_cast<std::int64_t>(g.out_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t occ = 0; occ < out_channels; ++occ) {
    const auto oc = static_cast<std::size_t>(occ);
    double* gk = grad_kernel.data() + oc * g.in_channels * kh * kw;
    std::fill(gk, gk + g.in_channels * kh * kw, 0.0);
    double gb = 0.0;
    for (std::size_t b = 0; b < g.batch; ++b) {
      const double* dout = grad_output.data() + (b * g.out_channels + oc) * oh * ow;
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          const double d = dout[i * ow + j];
          gb += d;
          for (std::size_t ic = 0; ic < g.in_channels; ++ic) {
            const double* in = input.data() + (b * g.in_channels + ic) * plane;
            double* gkc = gk + ic * kh * kw;
            for (std::size_t m = 0; m < kh; ++m) {
              const double* irow = in + tap_row(g, i, m) * g.in_width;
              for (std::size_t n = 0; n < kw; ++n)
                gkc[m * kw + n] += d * irow[tap_col(g, j, n)];
            }
          }
        }
      }
    }
    grad_bias[oc] = gb;
  }

  // Input gradient: one (batch, in_channel) plane per task.
  const auto in_planes = static_cast<std::int64_t>(g.batch * g.in_channels);
#pragma omp parallel for schedule(static)
  for (std::int64_t pp = 0; pp < in_planes; ++pp) {
    const std::size_t b = static_cast<std::size_t>(pp) / g.in_channels;
    const std::size_t ic = static_cast<std::size_t>(pp) % g.in_channels;
    double* gin = grad_input.data() + static_cast<std::size_t>(pp) * plane;
    std::fill(gin, gin + plane, 0.0);
    for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
      const double* dout = grad_output.data() + (b * g.out_channels + oc) * oh * ow;
      const double* kern = kernel.data() + (oc * g.in_channels + ic) * kh * kw;
      for (std::size_t i = 0; i < oh; ++i) {
        for (std::size_t j = 0; j < ow; ++j) {
          const double d = dout[i * ow + j];
          for (std::size_t m = 0; m < kh; ++m) {
            double* grow = gin + tap_row(g, i, m) * g.in_width;
            for (std::size_t n = 0; n < kw; ++n)
              grow[tap_col(g, j, n)] += d * kern[m * kw + n];
          }
        }
      }
    }
  }
}

void dense_forward(std::size_t batch, std::size_t in, std::size_t out,
                   std::span<const double> input,
                   std::span<const double> weight,
                   std::span<const double> bias, std::span<double> output) {
  assert(input.size() == batch * in && weight.size() == out * in);
  assert(bias.size() == out && output.size() == batch * out);
  const auto total = static_cast<std::int64_t>(batch * out);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < total; ++t) {
    const std::size_t b = static_cast<std::size_t>(t) / out;
    const std::size_t o = static_cast<std::size_t>(t) % out;
    const double* w = weight.data() + o * in;
    const double* a = input.data() + b * in;
    double acc = 0.0;
    for (std::size_t i = 0; i < in; ++i) acc += w[i] * a[i];
    output[static_cast<std::size_t>(t)] = acc + bias[o];
  }
}

void dense_backward(std::size_t batch, std::size_t in, std::size_t out,
                    std::span<const double> input,
                    std::span<const double> weight,
                    std::span<const double> grad_output,
                    std::span<double> grad_input,
                    std::span<double> grad_weight,
                    std::span<double> grad_bias) {
  assert(grad_output.size() == batch * out && grad_input.size() == batch * in);
  assert(grad_weight.size() == out * in && grad_bias.size() == out);
  const auto outs = static_cast<std::int64_t>(out);
#pragma omp parallel for schedule(static)
  for (std::int64_t oo = 0; oo < outs; ++oo) {
    const auto o = static_cast<std::size_t>(oo);
    double* gw = grad_weight.data() + o * in;
    std::fill(gw, gw + in, 0.0);
    double gb = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      const double d = grad_output[b * out + o];
      gb += d;
      const double* a = input.data() + b * in;
      for (std::size_t i = 0; i < in; ++i) gw[i] += d * a[i];
    }
    grad_bias[o] = gb;
  }
  const auto batches = static_cast<std::int64_t>(batch);
#pragma omp parallel for schedule(static)
  for (std::int64_t bb = 0; bb < batches; ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    double* ga = grad_input.data() + b * in;
    std::fill(ga, ga + in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = grad_output[b * out + o];
      const double* w = weight.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) ga[i] += d * w[i];
    }
  }
}

}  // namespace parallel

}  // namespace fairgrid::kernels
