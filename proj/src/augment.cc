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

#include "fairgrid/augment.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fmt/format.h"

namespace fairgrid::augment {

void AugmentConfig::validate() const {
  auto fail = [](const char* field, auto value) {
    throw std::invalid_argument(fmt::format("augment.{} is invalid ({})", field, value));
  };
  if (!(rescale_lo > 0.0)) fail("rescale_lo", rescale_lo);
  if (!(rescale_lo <= rescale_hi)) fail("rescale_hi", rescale_hi);
  if (!(shear_max >= 0.0 && shear_max < 1.5)) fail("shear_max", shear_max);
  if (!(zoom_lo > 0.0)) fail("zoom_lo", zoom_lo);
  if (!(zoom_lo <= zoom_hi)) fail("zoom_hi", zoom_hi);
  if (!(hflip_prob >= 0.0 && hflip_prob <= 1.0)) fail("hflip_prob", hflip_prob);
}

ImageTensor hflip(const ImageTensor& image) {
  ImageTensor out(image.height(), image.width(), image.channels());
  for (std::size_t y = 0; y < image.height(); ++y)
    for (std::size_t x = 0; x < image.width(); ++x)
      for (std::size_t c = 0; c < image.channels(); ++c)
        out.at(y, image.width() - 1 - x, c) = image.at(y, x, c);
  return out;
}

ImageTensor augment(const ImageTensor& image, const AugmentParams& params) {
  if (image.empty()) throw std::invalid_argument("augment of an empty image");
  if (!(params.zoom > 0.0)) {
    throw std::invalid_argument(fmt::format("zoom must be positive, got {}", params.zoom));
  }
  ImageTensor scaled = image;
  for (double& v : scaled.data()) v *= params.rescale;

  // Inverse map: source = S^-1 (dest - center) / zoom + center, where S
  // shears x by tan(shear) * y.
  const double k = std::tan(params.shear);
  const double cy = (static_cast<double>(image.height()) - 1.0) / 2.0;
  const double cx = (static_cast<double>(image.width()) - 1.0) / 2.0;
  ImageTensor warped(image.height(), image.width(), image.channels());
  for (std::size_t y = 0; y < image.height(); ++y) {
    const double dy = (static_cast<double>(y) - cy) / params.zoom;
    for (std::size_t x = 0; x < image.width(); ++x) {
      const double dx = (static_cast<double>(x) - cx) / params.zoom;
      const double sx = dx - k * dy + cx;
      const double sy = dy + cy;
      for (std::size_t c = 0; c < image.channels(); ++c)
        warped.at(y, x, c) = sample_bilinear(scaled, sy, sx, c);
    }
  }
  if (params.flip) warped = hflip(warped);
  return clamp_unit(std::move(warped));
}

AugmentParams sample_params(const AugmentConfig& config, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  AugmentParams p;
  const double r0 = unit(rng), r1 = unit(rng), r2 = unit(rng), r3 = unit(rng);
  p.rescale = config.rescale_lo + r0 * (config.rescale_hi - config.rescale_lo);
  p.shear = config.shear_max * (2.0 * r1 - 1.0);
  p.zoom = config.zoom_lo + r2 * (config.zoom_hi - config.zoom_lo);
  p.flip = r3 < config.hflip_prob;
  return p;
}

}  // namespace fairgrid::augment
