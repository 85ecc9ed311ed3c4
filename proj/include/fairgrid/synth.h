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

#ifndef FAIRGRID_SYNTH_H_
#define FAIRGRID_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fairgrid/image.h"
#include "fairgrid/ingest.h"

namespace fairgrid::synth {

inline constexpr double kMinTone = 0.05;
inline constexpr double kMaxTone = 0.95;

struct SynthConfig {
  std::size_t n_per_cell = 200;  // per (subpopulation x class)
  double tone_a = 0.75;
  double tone_b = 0.35;
  double tone_jitter = 0.03;     // stddev of the per-image base tone
  std::size_t image_side = 64;
  double noise_std = 0.05;
  std::uint64_t rng_seed = 0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Dataset {
  std::vector<ImageTensor> images;  // single-channel, image_side^2
  // image_path is a relative file name (images/img_NNNNN.png); split holds
  // the subpopulation tag "A" or "B".
  std::vector<ingest::SampleRecord> records;
};

// Order: subpopulation A then B; within each, label 0 then 1; n_per_cell
// images per cell. Each image draws from its own stream derived from the
// seed and its index.
Dataset generate(const SynthConfig& config);

// One image: base tone, oval face at +0.1, open eyes as 3-px-tall bright
// ellipses (+0.25) or closed eyes as 1-px dark lines (-0.2), Gaussian noise,
// clamped to [0, 1].
ImageTensor render_face(std::size_t side, double tone, bool eyes_open,
                        double noise_std, std::uint64_t noise_seed);

struct Split {
  std::vector<std::size_t> train;  // indices into the record list, ascending
  std::vector<std::size_t> test;   // held-out train_subpop, then the rest
};

// Holds out round(test_fraction * n) records of each class of train_subpop
// (chosen by a seeded shuffle) and puts every other subpopulation into the
// test set. Throws std::invalid_argument when train_subpop is absent, no
// other subpopulation exists, or test_fraction is outside [0, 1).
Split split_biased(const std::vector<ingest::SampleRecord>& records,
                   const std::string& train_subpop, double test_fraction,
                   std::uint64_t seed);

}  // namespace fairgrid::synth

#endif  // FAIRGRID_SYNTH_H_
