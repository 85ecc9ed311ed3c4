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

#include "fairgrid/nn/model.h"

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

// Number of parameter tensors a layer contributes.
std::size_t param_count(const Layer& layer) {
  return std::holds_alternative<Conv>(layer) || std::holds_alternative<Dense>(layer) ||
                 std::holds_alternative<BatchNorm>(layer)
             ? 2
             : 0;
}

Tensor batchnorm_backward(const Tensor& grad, const BatchNorm& layer,
                          const BatchNormCache& cache, Mode mode,
                          std::vector<double>& grad_gamma,
                          std::vector<double>& grad_beta) {
  const Shape& s = grad.shape();
  const std::size_t plane = s.h * s.w;
  const auto count = static_cast<double>(grad.batch() * plane);
  grad_gamma.assign(s.c, 0.0);
  grad_beta.assign(s.c, 0.0);
  Tensor gin(grad.batch(), s);
  for (std::size_t c = 0; c < s.c; ++c) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t b = 0; b < grad.batch(); ++b) {
      for (std::size_t k = 0; k < plane; ++k) {
        const std::size_t idx = (b * s.c + c) * plane + k;
        sum_g += grad.data()[idx];
        sum_gx += grad.data()[idx] * cache.normalized.data()[idx];
      }
    }
    grad_beta[c] = sum_g;
    grad_gamma[c] = sum_gx;
    const double inv_std = 1.0 / std::sqrt(cache.var[c] + layer.epsilon);
    const double scale = layer.gamma[c] * inv_std;
    for (std::size_t b = 0; b < grad.batch(); ++b) {
      for (std::size_t k = 0; k < plane; ++k) {
        const std::size_t idx = (b * s.c + c) * plane + k;
        if (mode == Mode::kTraining) {
          gin.data()[idx] = scale * (grad.data()[idx] - sum_g / count -
                                     cache.normalized.data()[idx] * sum_gx / count);
        } else {
          gin.data()[idx] = scale * grad.data()[idx];
        }
      }
    }
  }
  return gin;
}

}  // namespace

Model::Model(Shape input, std::vector<Layer> layers)
    : input_shape_(input), layers_(std::move(layers)) {
  output_shape();
}

Shape Model::output_shape() const {
  Shape s = input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    try {
      s = nn::output_shape(layers_[i], s);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(fmt::format("layer {} ({}): {}", i,
                                              layer_name(layers_[i]), e.what()));
    }
  }
  return s;
}

Tensor Model::run(const Tensor& input, Mode mode, Tape* tape, Rng* rng,
                  std::vector<BatchNormCache>* stats) const {
  if (input.shape() != input_shape_) {
    throw std::invalid_argument(fmt::format("model expects input {}, got {}",
                                            input_shape_.str(), input.shape().str()));
  }
  if (tape) {
    *tape = Tape{};
    tape->mode = mode;
    tape->inputs.reserve(layers_.size());
    tape->argmax.resize(layers_.size());
    tape->masks.resize(layers_.size());
    tape->batchnorm.resize(layers_.size());
  }
  Tensor cur = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Tensor next = std::visit(
        Overloaded{
            [&](const Conv& c) { return conv_forward(cur, c); },
            [&](const Relu&) { return relu_forward(cur); },
            [&](const MaxPool& p) {
              PoolResult r = maxpool_forward(cur, p.window, p.stride);
              if (tape) tape->argmax[i] = std::move(r.argmax);
              return std::move(r.output);
            },
            [&](const Flatten&) { return cur.reshaped(Shape{cur.shape().size(), 1, 1}); },
            [&](const Dense& d) { return dense_forward(cur, d); },
            [&](const Dropout& d) {
              return dropout_forward(cur, d.rate, mode, rng,
                                     tape ? &tape->masks[i] : nullptr);
            },
            [&](const BatchNorm& bn) {
              BatchNormCache cache;
              Tensor out = batchnorm_forward(cur, bn, mode, &cache);
              if (stats) (*stats)[i] = cache;
              if (tape) tape->batchnorm[i] = std::move(cache);
              return out;
            },
            [&](const Sigmoid&) { return sigmoid_forward(cur); }},
        layers_[i]);
    if (tape) tape->inputs.push_back(std::move(cur));
    cur = std::move(next);
  }
  if (tape) tape->output = cur;
  return cur;
}

Tensor Model::forward(const Tensor& input, Tape* tape, Rng* rng) {
  if (mode_ == Mode::kInference) return run(input, mode_, tape, rng, nullptr);
  std::vector<BatchNormCache> stats(layers_.size());
  Tensor out = run(input, mode_, tape, rng, &stats);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (auto* bn = std::get_if<BatchNorm>(&layers_[i])) update_running_stats(*bn, stats[i]);
  }
  return out;
}

Tensor Model::predict(const Tensor& input, Tape* tape) const {
  return run(input, Mode::kInference, tape, nullptr, nullptr);
}

Gradients Model::backward(const Tape& tape, const Tensor& grad_output) const {
  if (tape.empty() || tape.inputs.size() != layers_.size()) {
    throw std::invalid_argument("backward called without forward caches");
  }
  if (grad_output.batch() != tape.output.batch() ||
      grad_output.shape() != tape.output.shape()) {
    throw std::invalid_argument("output gradient does not match forward output");
  }
  return backward_through(tape, grad_output, layers_.size());
}

Gradients Model::backward_through(const Tape& tape, Tensor grad,
                                  std::size_t end) const {
  Gradients grads;
  std::size_t slot = 0;
  for (const Layer& l : layers_) slot += param_count(l);
  grads.params.resize(slot);
  for (std::size_t li = end; li < layers_.size(); ++li) slot -= param_count(layers_[li]);

  for (std::size_t li = end; li-- > 0;) {
    const Tensor& in = tape.inputs[li];
    slot -= param_count(layers_[li]);
    grad = std::visit(
        Overloaded{
            [&](const Conv& c) {
              const auto g = geometry(c, in.batch(), in.shape());
              Tensor gin(in.batch(), in.shape());
              auto& gk = grads.params[slot];
              auto& gb = grads.params[slot + 1];
              gk.resize(c.kernel.size());
              gb.resize(c.bias.size());
              kernels::parallel::conv2d_backward(g, in.data(), c.kernel,
                                                 grad.data(), gin.data(), gk, gb);
              return gin;
            },
            [&](const Relu&) {
              Tensor gin = grad;
              for (std::size_t k = 0; k < gin.size(); ++k)
                if (!(in.data()[k] > 0.0)) gin.data()[k] = 0.0;
              return gin;
            },
            [&](const MaxPool&) {
              Tensor gin(in.batch(), in.shape());
              const auto& argmax = tape.argmax[li];
              for (std::size_t k = 0; k < grad.size(); ++k)
                gin.data()[argmax[k]] += grad.data()[k];
              return gin;
            },
            [&](const Flatten&) { return grad.reshaped(in.shape()); },
            [&](const Dense& d) {
              Tensor gin(in.batch(), in.shape());
              auto& gw = grads.params[slot];
              auto& gb = grads.params[slot + 1];
              gw.resize(d.weight.size());
              gb.resize(d.bias.size());
              kernels::parallel::dense_backward(in.batch(), d.in, d.out, in.data(),
                                                d.weight, grad.data(), gin.data(),
                                                gw, gb);
              return gin;
            },
            [&](const Dropout&) {
              Tensor gin = grad;
              const auto& mask = tape.masks[li];
              if (!mask.empty()) {
                for (std::size_t k = 0; k < gin.size(); ++k) gin.data()[k] *= mask[k];
              }
              return gin;
            },
            [&](const BatchNorm& bn) {
              return batchnorm_backward(grad, bn, tape.batchnorm[li], tape.mode,
                                        grads.params[slot], grads.params[slot + 1]);
            },
            [&](const Sigmoid&) {
              Tensor gin = grad;
              for (std::size_t k = 0; k < gin.size(); ++k) {
                const double o = sigmoid(in.data()[k]);
                gin.data()[k] *= o * (1.0 - o);
              }
              return gin;
            }},
        layers_[li]);
  }
  grads.input = std::move(grad);
  return grads;
}

Gradients Model::backward_loss(const Tape& tape,
                               std::span<const int> labels) const {
  if (tape.empty()) throw std::invalid_argument("backward called without forward caches");
  const Tensor& out = tape.output;
  if (out.shape().size() != 1 || labels.size() != out.batch()) {
    throw std::invalid_argument(fmt::format(
        "loss needs one scalar output per label: {} outputs of shape {}, {} labels",
        out.batch(), out.shape().str(), labels.size()));
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw std::invalid_argument(fmt::format("label {} is not binary", y));
  }
  const auto n = static_cast<double>(labels.size());
  if (tape.inputs.size() != layers_.size()) {
    throw std::invalid_argument("backward called without forward caches");
  }
  Tensor grad(out.batch(), out.shape());
  const bool fused = !layers_.empty() && std::holds_alternative<Sigmoid>(layers_.back());
  if (fused) {
    // d/dz of -[y log s(z) + (1-y) log(1-s(z))] is s(z) - y.
    for (std::size_t b = 0; b < labels.size(); ++b)
      grad.data()[b] = (out.data()[b] - static_cast<double>(labels[b])) / n;
    return backward_through(tape, grad.reshaped(tape.inputs.back().shape()),
                            layers_.size() - 1);
  }
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const double o = out.data()[b];
    const double y = labels[b];
    const double lo = std::max(o, kBceEpsilon);
    const double hi = std::max(1.0 - o, kBceEpsilon);
    double d = 0.0;
    if (y == 1.0 && o > kBceEpsilon) d = -1.0 / lo;
    if (y == 0.0 && 1.0 - o > kBceEpsilon) d = 1.0 / hi;
    grad.data()[b] = d / n;
  }
  return backward(tape, grad);
}

std::vector<ParamRef> Model::parameters() {
  std::vector<ParamRef> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = fmt::format("{}.{}", i, layer_name(layers_[i]));
    std::visit(Overloaded{[&](Conv& c) {
                            out.push_back({prefix + ".kernel", c.kernel});
                            out.push_back({prefix + ".bias", c.bias});
                          },
                          [&](Dense& d) {
                            out.push_back({prefix + ".weight", d.weight});
                            out.push_back({prefix + ".bias", d.bias});
                          },
                          [&](BatchNorm& bn) {
                            out.push_back({prefix + ".gamma", bn.gamma});
                            out.push_back({prefix + ".beta", bn.beta});
                          },
                          [](auto&) {}},
               layers_[i]);
  }
  return out;
}

std::vector<std::span<const double>> Model::parameters() const {
  std::vector<std::span<const double>> out;
  for (auto& p : const_cast<Model*>(this)->parameters()) out.emplace_back(p.values);
  return out;
}

std::vector<std::string> Model::parameter_names() const {
  std::vector<std::string> out;
  for (auto& p : const_cast<Model*>(this)->parameters()) out.push_back(p.name);
  return out;
}

bool Model::has_batchnorm() const {
  for (const Layer& l : layers_)
    if (std::holds_alternative<BatchNorm>(l)) return true;
  return false;
}

void Model::require_binary_head() const {
  if (layers_.empty() || !std::holds_alternative<Sigmoid>(layers_.back()) ||
      output_shape().size() != 1) {
    throw std::invalid_argument(
        "model must end in a sigmoid with a single output for binary tasks");
  }
}

double mean_bce(std::span<const double> outputs, std::span<const int> labels) {
  if (outputs.size() != labels.size() || outputs.empty()) {
    throw std::invalid_argument(fmt::format(
        "mean_bce: {} outputs for {} labels", outputs.size(), labels.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) total += bce_loss(labels[i], outputs[i]);
  return total / static_cast<double>(outputs.size());
}

Model make_cnn(const ArchConfig& arch, std::uint64_t seed) {
  std::vector<Layer> layers;
  Shape s = arch.input;
  auto push = [&](Layer l) {
    s = nn::output_shape(l, s);
    layers.push_back(std::move(l));
  };
  push(make_conv(s.c, arch.conv1_channels, arch.kernel, arch.kernel));
  if (arch.batchnorm) push(make_batchnorm(arch.conv1_channels));
  push(Relu{});
  push(MaxPool{arch.pool, arch.pool});
  push(make_conv(s.c, arch.conv2_channels, arch.kernel, arch.kernel));
  if (arch.batchnorm) push(make_batchnorm(arch.conv2_channels));
  push(Relu{});
  push(MaxPool{arch.pool, arch.pool});
  push(Flatten{});
  push(make_dense(s.size(), arch.dense1));
  if (arch.batchnorm) push(make_batchnorm(arch.dense1));
  push(Relu{});
  push(Dropout{arch.dropout});
  push(make_dense(arch.dense1, arch.dense2));
  push(Relu{});
  push(make_dense(arch.dense2, 1));
  push(Sigmoid{});
  Model model(arch.input, std::move(layers));
  initialize(model, seed);
  return model;
}

void initialize(Model& model, std::uint64_t seed) {
  Rng rng(seed);
  for (Layer& layer : model.mutable_layers()) {
    std::visit(Overloaded{[&](Conv& c) {
                            const double limit = std::sqrt(
                                6.0 / static_cast<double>(c.in_channels * c.kernel_h * c.kernel_w));
                            std::uniform_real_distribution<double> u(-limit, limit);
                            for (double& v : c.kernel) v = u(rng);
                            std::fill(c.bias.begin(), c.bias.end(), 0.0);
                          },
                          [&](Dense& d) {
                            const double limit = std::sqrt(6.0 / static_cast<double>(d.in));
                            std::uniform_real_distribution<double> u(-limit, limit);
                            for (double& v : d.weight) v = u(rng);
                            std::fill(d.bias.begin(), d.bias.end(), 0.0);
                          },
                          [&](BatchNorm& bn) {
                            std::fill(bn.gamma.begin(), bn.gamma.end(), 1.0);
                            std::fill(bn.beta.begin(), bn.beta.end(), 0.0);
                            std::fill(bn.running_mean.begin(), bn.running_mean.end(), 0.0);
                            std::fill(bn.running_var.begin(), bn.running_var.end(), 1.0);
                          },
                          [](auto&) {}},
               layer);
  }
}

}  // namespace fairgrid::nn
