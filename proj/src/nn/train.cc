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

#include "fairgrid/nn/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fmt/format.h"

namespace fairgrid::nn {

namespace {

Rng derive_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return Rng(seq);
}

void check_dataset(const Model& model, const LabeledImages& data) {
  if (data.images.empty()) throw std::invalid_argument("dataset is empty");
  if (data.labels.size() != data.images.size()) {
    throw std::invalid_argument(fmt::format("{} images but {} labels",
                                            data.images.size(), data.labels.size()));
  }
  const Shape& s = model.input_shape();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ImageTensor& img = data.images[i];
    if (img.channels() != s.c || img.height() != s.h || img.width() != s.w) {
      throw std::invalid_argument(fmt::format(
          "image {} is {}x{}x{}, model expects {}", i, img.channels(), img.height(),
          img.width(), s.str()));
    }
    if (data.labels[i] != 0 && data.labels[i] != 1) {
      throw std::invalid_argument(
          fmt::format("image {} has non-binary label {}", i, data.labels[i]));
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const char* field, auto value) {
    throw std::invalid_argument(fmt::format("train.{} is invalid ({})", field, value));
  };
  if (!(learning_rate >= 0.0)) fail("learning_rate", learning_rate);
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1", beta1);
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2", beta2);
  if (!(epsilon_adam > 0.0)) fail("epsilon_adam", epsilon_adam);
  if (batch_size < 1) fail("batch_size", batch_size);
  if (epochs < 1) fail("epochs", epochs);
}

TrainResult train(Model& model, const LabeledImages& data,
                  const TrainConfig& config,
                  const std::optional<augment::AugmentConfig>& augment_config) {
  config.validate();
  if (augment_config) augment_config->validate();
  model.require_binary_head();
  check_dataset(model, data);

  Rng shuffle_rng = derive_rng(config.rng_seed, 1);
  Rng dropout_rng = derive_rng(config.rng_seed, 2);
  Rng augment_rng = derive_rng(augment_config ? augment_config->rng_seed : config.rng_seed, 3);
  const bool needs_pairs = model.has_batchnorm();
  const Shape shape = model.input_shape();
  const AdamConfig adam = config.adam();

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  AdamState state;
  TrainResult result;
  model.set_mode(Mode::kTraining);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t correct = 0, seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      const std::size_t n = end - start;
      // Training-mode batch norm cannot normalize a single sample.
      if (n < 2 && needs_pairs) continue;
      Tensor batch(n, shape);
      std::vector<int> labels(n);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = order[start + k];
        labels[k] = data.labels[idx];
        if (augment_config) {
          const auto params = augment::sample_params(*augment_config, augment_rng);
          copy_into(augment::augment(data.images[idx], params), batch, k);
        } else {
          copy_into(data.images[idx], batch, k);
        }
      }
      Tape tape;
      const Tensor out = model.forward(batch, &tape, &dropout_rng);
      for (std::size_t k = 0; k < n; ++k) {
        const double o = out.data()[k];
        loss_sum += bce_loss(labels[k], o);
        if ((o >= 0.5 ? 1 : 0) == labels[k]) ++correct;
      }
      seen += n;
      const Gradients grads = model.backward_loss(tape, labels);
      std::vector<std::span<double>> params;
      for (auto& p : model.parameters()) params.push_back(p.values);
      adam_step(params, grads.params, state, adam);
    }
    EpochStats stats;
    if (seen > 0) {
      stats.loss = loss_sum / static_cast<double>(seen);
      stats.accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    }
    result.history.push_back(stats);
  }
  model.set_mode(Mode::kInference);
  return result;
}

std::vector<double> predict_all(const Model& model,
                                const std::vector<ImageTensor>& images) {
  model.require_binary_head();
  constexpr std::size_t kChunk = 64;
  std::vector<double> outputs;
  outputs.reserve(images.size());
  for (std::size_t start = 0; start < images.size(); start += kChunk) {
    const std::size_t end = std::min(start + kChunk, images.size());
    Tensor batch(end - start, model.input_shape());
    for (std::size_t k = start; k < end; ++k) copy_into(images[k], batch, k - start);
    const Tensor out = model.predict(batch);
    outputs.insert(outputs.end(), out.data().begin(), out.data().end());
  }
  return outputs;
}

Metrics evaluate(const Model& model, const LabeledImages& data) {
  check_dataset(model, data);
  const std::vector<double> outputs = predict_all(model, data.images);
  Metrics m;
  m.count = data.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    if ((outputs[i] >= 0.5 ? 1 : 0) == data.labels[i]) ++correct;
  m.accuracy = static_cast<double>(correct) / static_cast<double>(m.count);
  m.mean_bce = mean_bce(outputs, data.labels);
  return m;
}

ImageTensor input_saliency(const Model& model, const ImageTensor& image) {
  Tape tape;
  const Tensor out = model.predict(to_tensor(image), &tape);
  if (out.size() != 1) {
    throw std::invalid_argument(
        fmt::format("saliency needs a scalar output, model gives {}", out.shape().str()));
  }
  const Gradients g = model.backward(tape, Tensor(1, out.shape(), 1.0));
  const Shape& s = g.input.shape();
  ImageTensor map(s.h, s.w, 1);
  for (std::size_t y = 0; y < s.h; ++y) {
    for (std::size_t x = 0; x < s.w; ++x) {
      double best = 0.0;
      for (std::size_t c = 0; c < s.c; ++c)
        best = std::max(best, std::fabs(g.input.at(0, c, y, x)));
      map.at(y, x) = best;
    }
  }
  const auto [lo, hi] = std::minmax_element(map.data().begin(), map.data().end());
  const double min = *lo, range = *hi - *lo;
  for (double& v : map.data()) v = range > 0.0 ? (v - min) / range : 0.0;
  return map;
}

}  // namespace fairgrid::nn
