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

#ifndef FAIRGRID_IMAGE_H_
#define FAIRGRID_IMAGE_H_

#include <cstddef>
#include <span>
#include <vector>

namespace fairgrid {

// h x w x c intensities in [0, 1], interleaved (row-major pixels, channels
// innermost). c is 1 (gray) or 3 (RGB).
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(std::size_t height, std::size_t width, std::size_t channels,
              double fill = 0.0);
  // Throws std::invalid_argument on a size mismatch.
  ImageTensor(std::size_t height, std::size_t width, std::size_t channels,
              std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  double& at(std::size_t y, std::size_t x, std::size_t c = 0) {
    return data_[(y * width_ + x) * channels_ + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c = 0) const {
    return data_[(y * width_ + x) * channels_ + c];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

// Luminance 0.299 R + 0.587 G + 0.114 B; gray images are returned as is.
ImageTensor to_grayscale(const ImageTensor& image);

// Gray replicated into three channels; RGB images are returned as is.
ImageTensor to_rgb(const ImageTensor& image);

// Bilinear resampling with pixel-center alignment and edge clamping. A
// same-size resize returns the input unchanged and a constant image stays
// exactly constant.
ImageTensor resize_bilinear(const ImageTensor& image, std::size_t height,
                            std::size_t width);

// Bilinear sample at fractional pixel coordinates (x right, y down), clamped
// to the image border.
double sample_bilinear(const ImageTensor& image, double y, double x,
                       std::size_t channel);

ImageTensor clamp_unit(ImageTensor image);

}  // namespace fairgrid

#endif  // FAIRGRID_IMAGE_H_
