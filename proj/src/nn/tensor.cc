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

#include "fairgrid/nn/tensor.h"

#include <stdexcept>

#include "fmt/format.h"

namespace fairgrid::nn {

std::string Shape::str() const { return fmt::format("{}x{}x{}", c, h, w); }

Tensor::Tensor(std::size_t batch, Shape shape, double fill)
    : batch_(batch), shape_(shape), data_(batch * shape.size(), fill) {}

Tensor::Tensor(std::size_t batch, Shape shape, std::vector<double> data)
    : batch_(batch), shape_(shape), data_(std::move(data)) {
  if (data_.size() != batch * shape.size()) {
    throw std::invalid_argument(fmt::format(
        "tensor data length {} does not match {} x {}", data_.size(), batch,
        shape.str()));
  }
}

Tensor Tensor::reshaped(Shape shape) const {
  if (shape.size() != shape_.size()) {
    throw std::invalid_argument(fmt::format("cannot reshape {} to {}",
                                            shape_.str(), shape.str()));
  }
  return Tensor(batch_, shape, data_);
}

void copy_into(const ImageTensor& image, Tensor& batch, std::size_t index) {
  const Shape& s = batch.shape();
  if (image.channels() != s.c || image.height() != s.h || image.width() != s.w) {
    throw std::invalid_argument(fmt::format(
        "image {}x{}x{} does not match tensor sample shape {}", image.channels(),
        image.height(), image.width(), s.str()));
  }
  for (std::size_t c = 0; c < s.c; ++c)
    for (std::size_t y = 0; y < s.h; ++y)
      for (std::size_t x = 0; x < s.w; ++x)
        batch.at(index, c, y, x) = image.at(y, x, c);
}

Tensor to_tensor(const ImageTensor& image) {
  Tensor t(1, Shape{image.channels(), image.height(), image.width()});
  copy_into(image, t, 0);
  return t;
}

ImageTensor to_image(const Tensor& tensor, std::size_t index) {
  const Shape& s = tensor.shape();
  ImageTensor image(s.h, s.w, s.c);
  for (std::size_t c = 0; c < s.c; ++c)
    for (std::size_t y = 0; y < s.h; ++y)
      for (std::size_t x = 0; x < s.w; ++x)
        image.at(y, x, c) = tensor.at(index, c, y, x);
  return image;
}

}  // namespace fairgrid::nn
