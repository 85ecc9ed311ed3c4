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

#ifndef FAIRGRID_NN_TRAIN_H_
#define FAIRGRID_NN_TRAIN_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "fairgrid/augment.h"
#include "fairgrid/image.h"
#include "fairgrid/nn/adam.h"
#include "fairgrid/nn/model.h"

namespace fairgrid::nn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_adam = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t rng_seed = 0;

  AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon_adam}; }
  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Images already shaped like the model input, with binary labels.
struct LabeledImages {
  std::vector<ImageTensor> images;
  std::vector<int> labels;

  std::size_t size() const { return images.size(); }
};

struct EpochStats {
  double loss = 0.0;      // mean training BCE over the epoch
  double accuracy = 0.0;  // training accuracy at threshold 0.5
};

struct TrainResult {
  std::vector<EpochStats> history;
};

// Mini-batch Adam on the mean BCE. Shuffling, dropout and augmentation draw
// from independent streams derived from config.rng_seed, so identical inputs
// give bit-identical parameters. The model is left in inference mode.
TrainResult train(Model& model, const LabeledImages& data,
                  const TrainConfig& config,
                  const std::optional<augment::AugmentConfig>& augment_config);

struct Metrics {
  double accuracy = 0.0;  // fraction with (o >= 0.5) == y
  double mean_bce = 0.0;
  std::size_t count = 0;
};

// Inference-mode outputs, one per image.
std::vector<double> predict_all(const Model& model,
                                const std::vector<ImageTensor>& images);

Metrics evaluate(const Model& model, const LabeledImages& data);

// |d output / d pixel| reduced by channel max and min-max normalized to
// [0, 1], as a single-channel image. A flat map (including all-zero
// gradients) normalizes to all zeros.
ImageTensor input_saliency(const Model& model, const ImageTensor& image);

}  // namespace fairgrid::nn

#endif  // FAIRGRID_NN_TRAIN_H_
