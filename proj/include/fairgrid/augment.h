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

#ifndef FAIRGRID_AUGMENT_H_
#define FAIRGRID_AUGMENT_H_

#include <cstdint>
#include <random>

#include "fairgrid/image.h"

namespace fairgrid::augment {

// Ranges the training-time transforms are drawn from.
struct AugmentConfig {
  double rescale_lo = 0.8;  // multiplicative intensity factor
  double rescale_hi = 1.2;
  double shear_max = 0.2;   // radians, drawn from [-shear_max, shear_max]
  double zoom_lo = 0.9;     // > 1 magnifies
  double zoom_hi = 1.1;
  double hflip_prob = 0.5;
  std::uint64_t rng_seed = 0;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct AugmentParams {
  double rescale = 1.0;
  double shear = 0.0;
  double zoom = 1.0;
  bool flip = false;
};

// Intensity rescale, then shear and zoom about the image center (bilinear,
// edge-clamped), then an optional horizontal flip. Output has the input's
// shape and is clamped to [0, 1]. Throws std::invalid_argument for an empty
// image or zoom <= 0.
ImageTensor augment(const ImageTensor& image, const AugmentParams& params);

// Draws one parameter set uniformly from the configured ranges. Always
// consumes four draws so streams stay aligned across configs.
AugmentParams sample_params(const AugmentConfig& config, std::mt19937_64& rng);

ImageTensor hflip(const ImageTensor& image);

}  // namespace fairgrid::augment

#endif  // FAIRGRID_AUGMENT_H_
