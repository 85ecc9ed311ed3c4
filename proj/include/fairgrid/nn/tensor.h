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

#ifndef FAIRGRID_NN_TENSOR_H_
#define FAIRGRID_NN_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairgrid/image.h"

namespace fairgrid::nn {

// Per-sample shape (channels, height, width). Feature vectors are (n, 1, 1).
struct Shape {
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t size() const { return c * h * w; }
  std::string str() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Batch of samples in NCHW order.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t batch, Shape shape, double fill = 0.0);
  Tensor(std::size_t batch, Shape shape, std::vector<double> data);

  std::size_t batch() const { return batch_; }
  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) {
    return data_[((b * shape_.c + c) * shape_.h + y) * shape_.w + x];
  }
  double at(std::size_t b, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[((b * shape_.c + c) * shape_.h + y) * shape_.w + x];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> sample(std::size_t b) {
    return {data_.data() + b * shape_.size(), shape_.size()};
  }
  std::span<const double> sample(std::size_t b) const {
    return {data_.data() + b * shape_.size(), shape_.size()};
  }

  // Same data, new per-sample shape of equal size.
  Tensor reshaped(Shape shape) const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t batch_ = 0;
  Shape shape_;
  std::vector<double> data_;
};

// Interleaved HWC image -> single-sample CHW tensor, and back.
Tensor to_tensor(const ImageTensor& image);
void copy_into(const ImageTensor& image, Tensor& batch, std::size_t index);
ImageTensor to_image(const Tensor& tensor, std::size_t index = 0);

}  // namespace fairgrid::nn

#endif  // FAIRGRID_NN_TENSOR_H_
