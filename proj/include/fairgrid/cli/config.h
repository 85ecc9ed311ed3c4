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

#ifndef FAIRGRID_CLI_CONFIG_H_
#define FAIRGRID_CLI_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairgrid/augment.h"
#include "fairgrid/nn/model.h"
#include "fairgrid/nn/train.h"
#include "fairgrid/synth.h"

namespace fairgrid::cli {

enum class Command { kSynth, kTrain, kAudit, kSaliency, kReport };

// Every setting of every subcommand. The single seed feeds synthesis,
// splitting, initialization, shuffling, dropout and augmentation.
struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  std::filesystem::path manifest;
  std::filesystem::path model;      // optional for audit
  std::filesystem::path audit_dir;  // report input; defaults to out_dir
  std::vector<std::filesystem::path> images;  // saliency inputs

  synth::SynthConfig synth;
  std::string train_subpop = "A";
  double test_fraction = 0.25;

  nn::TrainConfig train;
  std::size_t input_side = 150;
  bool grayscale_input = false;
  std::size_t conv1_channels = 8;
  std::size_t conv2_channels = 16;
  std::size_t dense1 = 64;
  std::size_t dense2 = 16;
  double dropout = 0.5;
  bool batchnorm = false;
  bool augment = true;
  augment::AugmentConfig augment_config;

  std::size_t rows = 0;  // 0 = floor(sqrt(N))
  std::size_t cols = 0;
  std::size_t pca_side = 32;
  std::string assigner = "greedy";  // or "exact"
  bool hard_labels = false;

  std::size_t tile = 32;
  double alpha = 0.45;
  double saliency_alpha = 0.45;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Sets `section.key`. Throws std::invalid_argument naming the key for an
// unknown key or an unparsable value.
void set_value(RunConfig& config, const std::string& key, const std::string& value);

// Every key with its current value, in a fixed order.
KeyValues effective_config(const RunConfig& config);

// Defaults, then the INI file (if any), then `overrides` in order.
RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const KeyValues& overrides);

// Checks every field and input path the command depends on. Throws
// std::invalid_argument naming the field or path.
void validate(const RunConfig& config, Command command);

nn::ArchConfig architecture(const RunConfig& config);

}  // namespace fairgrid::cli

#endif  // FAIRGRID_CLI_CONFIG_H_
