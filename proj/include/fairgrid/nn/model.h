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

#ifndef FAIRGRID_NN_MODEL_H_
#define FAIRGRID_NN_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairgrid/nn/layers.h"
#include "fairgrid/nn/tensor.h"

namespace fairgrid::nn {

// Everything backward() needs from a forward pass.
struct Tape {
  Mode mode = Mode::kInference;
  std::vector<Tensor> inputs;  // input of each layer
  Tensor output;
  std::vector<std::vector<std::size_t>> argmax;  // per layer, maxpool only
  std::vector<std::vector<double>> masks;        // per layer, dropout only
  std::vector<BatchNormCache> batchnorm;         // per layer, batchnorm only

  bool empty() const { return inputs.empty(); }
};

// Gradients aligned with Model::parameters(), plus the input gradient.
struct Gradients {
  std::vector<std::vector<double>> params;
  Tensor input;
};

struct ParamRef {
  std::string name;
  std::span<double> values;
};

class Model {
 public:
  Model() = default;
  // Throws std::invalid_argument if consecutive shapes are incompatible.
  Model(Shape input, std::vector<Layer> layers);

  const Shape& input_shape() const { return input_shape_; }
  Shape output_shape() const;
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  Mode mode() const { return mode_; }
  void set_mode(Mode mode) { mode_ = mode; }

  // Applies the layers under the current mode. Training mode draws dropout
  // masks from `rng` and updates batch-norm running statistics. Caches for
  // backward() go to `tape` when given.
  Tensor forward(const Tensor& input, Tape* tape = nullptr, Rng* rng = nullptr);

  // Inference-mode forward pass that leaves the model untouched.
  Tensor predict(const Tensor& input, Tape* tape = nullptr) const;

  // Reverse-mode gradients of sum_b <grad_output[b], output[b]>.
  Gradients backward(const Tape& tape, const Tensor& grad_output) const;

  // Gradients of the mean binary cross entropy over the batch. When the last
  // layer is a sigmoid the two are differentiated together (o - y).
  Gradients backward_loss(const Tape& tape, std::span<const int> labels) const;

  // Trainable tensors in a fixed order: conv kernel/bias, dense weight/bias,
  // batchnorm gamma/beta.
  std::vector<ParamRef> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::vector<std::string> parameter_names() const;

  bool has_batchnorm() const;
  // Throws unless the model ends in a sigmoid with a single output.
  void require_binary_head() const;

 private:
  Tensor run(const Tensor& input, Mode mode, Tape* tape, Rng* rng,
             std::vector<BatchNormCache>* stats) const;
  // Backpropagates `grad` (the gradient at the output of layer end-1)
  // through layers [0, end). Parameters of later layers get empty gradients.
  Gradients backward_through(const Tape& tape, Tensor grad, std::size_t end) const;

  Shape input_shape_;
  std::vector<Layer> layers_;
  Mode mode_ = Mode::kInference;
};

// Mean binary cross entropy of a batch of scalar outputs.
double mean_bce(std::span<const double> outputs, std::span<const int> labels);

struct ArchConfig {
  Shape input{3, 150, 150};
  std::size_t conv1_channels = 8;
  std::size_t conv2_channels = 16;
  std::size_t kernel = 3;
  std::size_t pool = 2;
  std::size_t dense1 = 64;
  std::size_t dense2 = 16;
  double dropout = 0.5;
  // Inserts a batch-norm layer after each conv and after the first dense.
  bool batchnorm = false;
};

// conv-relu-pool-conv-relu-pool-flatten-dense-relu-dropout-dense-relu-dense-
// sigmoid, weights drawn by initialize().
Model make_cnn(const ArchConfig& arch, std::uint64_t seed);

// Fan-in scaled uniform weights in +-sqrt(6 / fan_in), zero biases, unit
// gamma; deterministic in `seed`.
void initialize(Model& model, std::uint64_t seed);

}  // namespace fairgrid::nn

#endif  // FAIRGRID_NN_MODEL_H_
