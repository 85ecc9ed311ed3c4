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

#ifndef FAIRGRID_NN_LAYERS_H_
#define FAIRGRID_NN_LAYERS_H_

#include <cstddef>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "fairgrid/nn/tensor.h"

namespace fairgrid::nn {

using Rng = std::mt19937_64;

enum class Mode { kTraining, kInference };

// Valid-padding convolution. Kernel layout [out][in][kh][kw], one bias per
// output channel. By default a true convolution (flipped kernel).
struct Conv {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_h = 3;
  std::size_t kernel_w = 3;
  std::size_t stride = 1;
  bool cross_correlation = false;
  std::vector<double> kernel;
  std::vector<double> bias;
};

struct Relu {};

struct MaxPool {
  std::size_t window = 2;
  std::size_t stride = 2;
};

struct Flatten {};

// z = W a + b with W stored [out][in].
struct Dense {
  std::size_t in = 1;
  std::size_t out = 1;
  std::vector<double> weight;
  std::vector<double> bias;
};

// Inverted dropout; `rate` is the drop probability.
struct Dropout {
  double rate = 0.5;
};

// Per-channel normalization over (batch, height, width).
struct BatchNorm {
  std::size_t channels = 1;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double epsilon = 1e-5;
  double momentum = 0.1;
};

struct Sigmoid {};

using Layer =
    std::variant<Conv, Relu, MaxPool, Flatten, Dense, Dropout, BatchNorm, Sigmoid>;

// Constructors with zero-initialized parameters.
Conv make_conv(std::size_t in_channels, std::size_t out_channels,
               std::size_t kernel_h, std::size_t kernel_w,
               std::size_t stride = 1);
Dense make_dense(std::size_t in, std::size_t out);
BatchNorm make_batchnorm(std::size_t channels);

std::string layer_name(const Layer& layer);

// Per-sample output shape; throws std::invalid_argument if `in` is not
// accepted by the layer or its parameters are malformed.
Shape output_shape(const Layer& layer, const Shape& in);

// ---- Elementwise ---------------------------------------------------------

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// 1 / (1 + e^-z), evaluated as e^z / (1 + e^z) for negative z.
double sigmoid(double z);

// -[y log o + (1 - y) log(1 - o)] with both log arguments floored at 1e-12.
// Throws std::invalid_argument unless y is 0 or 1.
double bce_loss(int y, double o);
inline constexpr double kBceEpsilon = 1e-12;

// ---- Layer kernels -------------------------------------------------------

Tensor conv_forward(const Tensor& input, const Conv& layer);
Tensor relu_forward(const Tensor& input);

struct PoolResult {
  Tensor output;
  // Flat input index of each output's maximum (first occurrence on ties).
  std::vector<std::size_t> argmax;
};
PoolResult maxpool_forward(const Tensor& input, std::size_t window,
                           std::size_t stride);

Tensor dense_forward(const Tensor& input, const Dense& layer);
Tensor sigmoid_forward(const Tensor& input);

// Training mode draws a keep/drop mask from `rng` (written to `mask` as 0 or
// 1/(1-rate) when non-null); inference mode is the identity.
Tensor dropout_forward(const Tensor& input, double rate, Mode mode, Rng* rng,
                       std::vector<double>* mask = nullptr);

// Statistics used by a batch-norm forward pass, kept for backward.
struct BatchNormCache {
  std::vector<double> mean;
  std::vector<double> var;
  Tensor normalized;
};

// Training mode normalizes with the (biased) batch statistics and requires a
// batch of at least 2; inference mode uses the running statistics. Running
// statistics are not touched here (see update_running_stats).
Tensor batchnorm_forward(const Tensor& input, const BatchNorm& layer, Mode mode,
                         BatchNormCache* cache = nullptr);
void update_running_stats(BatchNorm& layer, const BatchNormCache& cache);

}  // namespace fairgrid::nn

#endif  // FAIRGRID_NN_LAYERS_H_
