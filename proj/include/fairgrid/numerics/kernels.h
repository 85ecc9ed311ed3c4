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

#ifndef FAIRGRID_NUMERICS_KERNELS_H_
#define FAIRGRID_NUMERICS_KERNELS_H_

#include <cstddef>
#include <span>

// Dense inner loops shared by the numerics and nn modules.
//
// Every kernel comes in two flavours with identical signatures: `serial` is
// the direct-summation reference kept for testing, `parallel` is the OpenMP
// version used by the library. Both accumulate each output element in the
// same order, so their results are bit-identical for a fixed input and
// independent of the thread count.
//
// Kernels overwrite their outputs; nothing is accumulated into caller data.

namespace fairgrid::kernels {

// Shape of a batched valid-padding 2-D convolution over NCHW tensors.
// Kernels are laid out [out_channel][in_channel][row][col].
struct ConvGeometry {
  std::size_t batch = 1;
  std::size_t in_channels = 1;
  std::size_t in_height = 1;
  std::size_t in_width = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_height = 1;
  std::size_t kernel_width = 1;
  std::size_t stride = 1;
  // false: true convolution, c(i,j) = sum I(i-m, j-n) K(m,n).
  // true: cross-correlation, c(i,j) = sum I(i+m, j+n) K(m,n).
  bool cross_correlation = false;

  std::size_t out_height() const {
    return (in_height - kernel_height) / stride + 1;
  }
  std::size_t out_width() const {
    return (in_width - kernel_width) / stride + 1;
  }
  std::size_t input_size() const {
    return batch * in_channels * in_height * in_width;
  }
  std::size_t kernel_size() const {
    return out_channels * in_channels * kernel_height * kernel_width;
  }
  std::size_t output_size() const {
    return batch * out_channels * out_height() * out_width();
  }
};

namespace serial {

// c (m x n) = a (m x k) * b (k x n), all row-major.
void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> c, std::size_t m, std::size_t k, std::size_t n);

void conv2d_forward(const ConvGeometry& g, std::span<const double> input,
                    std::span<const double> kernel,
                    std::span<const double> bias, std::span<double> output);

void conv2d_backward(const ConvGeometry& g, std::span<const double> input,
                     std::span<const double> kernel,
                     std::span<const double> grad_output,
                     std::span<double> grad_input,
                     std::span<double> grad_kernel,
                     std::span<double> grad_bias);

// output[b][o] = sum_i weight[o][i] * input[b][i] + bias[o]
void dense_forward(std::size_t batch, std::size_t in, std::size_t out,
                   std::span<const double> input,
                   std::span<const double> weight,
                   std::span<const double> bias, std::span<double> output);

void dense_backward(std::size_t batch, std::size_t in, std::size_t out,
                    std::span<const double> input,
                    std::span<const double> weight,
                    std::span<const double> grad_output,
                    std::span<double> grad_input,
                    std::span<double> grad_weight,
                    std::span<double> grad_bias);

}  // namespace serial

namespace parallel {

// c (m x n) = a (m x k) * b (k x n), all row-major.
void gemm(std::span<const double> a, std::span<const double> b,
          std::span<double> c, std::size_t m, std::size_t k, std::size_t n);

void conv2d_forward(const ConvGeometry& g, std::span<const double> input,
                    std::span<const double> kernel,
                    std::span<const double> bias, std::span<double> output);

void conv2d_backward(const ConvGeometry& g, std::span<const double> input,
                     std::span<const double> kernel,
                     std::span<const double> grad_output,
                     std::span<double> grad_input,
                     std::span<double> grad_kernel,
                     std::span<double> grad_bias);

// output[b][o] = sum_i weight[o][i] * input[b][i] + bias[o]
void dense_forward(std::size_t batch, std::size_t in, std::size_t out,
                   std::span<const double> input,
                   std::span<const double> weight,
                   std::span<const double> bias, std::span<double> output);

void dense_backward(std::size_t batch, std::size_t in, std::size_t out,
                    std::span<const double> input,
                    std::span<const double> weight,
                    std::span<const double> grad_output,
                    std::span<double> grad_input,
                    std::span<double> grad_weight,
                    std::span<double> grad_bias);

}  // namespace parallel

}  // namespace fairgrid::kernels

#endif  // FAIRGRID_NUMERICS_KERNELS_H_
