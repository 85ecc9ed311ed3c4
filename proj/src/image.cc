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

#include "fairgrid/image.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fmt/format.h"

namespace fairgrid {

ImageTensor::ImageTensor(std::size_t height, std::size_t width,
                         std::size_t channels, double fill)
    : height_(height),
      width_(width),
      channels_(channels),
      data_(height * width * channels, fill) {}

ImageTensor::ImageTensor(std::size_t height, std::size_t width,
                         std::size_t channels, std::vector<double> data)
    : height_(height),
      width_(width),
      channels_(channels),
      data_(std::move(data)) {
  if (data_.size() != height * width * channels) {
    throw std::invalid_argument(
        fmt::format("image data length {} does not match {}x{}x{}",
                    data_.size(), height, width, channels));
  }
}

ImageTensor to_grayscale(const ImageTensor& image) {
  if (image.channels() == 1) return image;
  if (image.channels() != 3) {
    throw std::invalid_argument(
        fmt::format("cannot convert {} channels to gray", image.channels()));
  }
  ImageTensor gray(image.height(), image.width(), 1);
  for (std::size_t y = 0; y < image.height(); ++y) {
    for (std::size_t x = 0; x < image.width(); ++x) {
      gray.at(y, x) = 0.299 * image.at(y, x, 0) + 0.587 * image.at(y, x, 1) +
                      0.114 * image.at(y, x, 2);
    }
  }
  return gray;
}

ImageTensor to_rgb(const ImageTensor& image) {
  if (image.channels() == 3) return image;
  if (image.channels() != 1) {
    throw std::invalid_argument(
        fmt::format("cannot convert {} channels to RGB", image.channels()));
  }
  ImageTensor rgb(image.height(), image.width(), 3);
  for (std::size_t y = 0; y < image.height(); ++y)
    for (std::size_t x = 0; x < image.width(); ++x)
      for (std::size_t c = 0; c < 3; ++c) rgb.at(y, x, c) = image.at(y, x);
  return rgb;
}

double sample_bilinear(const ImageTensor& image, double y, double x,
                       std::size_t channel) {
  const double ymax = static_cast<double>(image.height() - 1);
  const double xmax = static_cast<double>(image.width() - 1);
  y = std::clamp(y, 0.0, ymax);
  x = std::clamp(x, 0.0, xmax);
  const auto y0 = static_cast<std::size_t>(std::floor(y));
  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
  const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
  const double fy = y - static_cast<double>(y0);
  const double fx = x - static_cast<double>(x0);
  // a + t * (b - a) keeps equal neighbours exact.
  const double a = image.at(y0, x0, channel);
  const double b = image.at(y0, x1, channel);
  const double c = image.at(y1, x0, channel);
  const double d = image.at(y1, x1, channel);
  const double top = a + fx * (b - a);
  const double bottom = c + fx * (d - c);
  return top + fy * (bottom - top);
}

ImageTensor resize_bilinear(const ImageTensor& image, std::size_t height,
                            std::size_t width) {
  if (height == 0 || width == 0) {
    throw std::invalid_argument(
        fmt::format("resize target {}x{} has a zero dimension", height, width));
  }
  if (image.empty()) throw std::invalid_argument("resize of an empty image");
  if (height == image.height() && width == image.width()) return image;
  ImageTensor out(height, width, image.channels());
  const double sy = static_cast<double>(image.height()) / static_cast<double>(height);
  const double sx = static_cast<double>(image.width()) / static_cast<double>(width);
  for (std::size_t y = 0; y < height; ++y) {
    const double src_y = (static_cast<double>(y) + 0.5) * sy - 0.5;
    for (std::size_t x = 0; x < width; ++x) {
      const double src_x = (static_cast<double>(x) + 0.5) * sx - 0.5;
      for (std::size_t c = 0; c < image.channels(); ++c)
        out.at(y, x, c) = sample_bilinear(image, src_y, src_x, c);
    }
  }
  return out;
}

ImageTensor clamp_unit(ImageTensor image) {
  for (double& v : image.data()) v = std::clamp(v, 0.0, 1.0);
  return image;
}

}  // namespace fairgrid
