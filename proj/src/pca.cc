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

#include "fairgrid/pca.h"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "fairgrid/numerics/svd.h"
#include "fmt/format.h"
#include "fmt/ostream.h"

namespace fairgrid::pca {

Centered mean_center(const Matrix& images) {
  if (images.rows() == 0 || images.cols() == 0) {
    throw std::invalid_argument("mean_center: empty image matrix");
  }
  const std::size_t n = images.rows(), p = images.cols();
  Centered out{images, std::vector<double>(p, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < p; ++c) out.mean[c] += images(i, c);
  for (double& m : out.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < p; ++c) out.centered(i, c) -= out.mean[c];
  return out;
}

PcaModel fit_project(const Matrix& images, std::size_t dims) {
  const std::size_t n = images.rows(), p = images.cols();
  if (n < 2) {
    throw std::invalid_argument(
        fmt::format("fit_project needs at least 2 images, got {}", n));
  }
  if (dims < 1 || dims > std::min(n, p)) {
    throw std::invalid_argument(fmt::format(
        "fit_project: dims {} out of range [1, {}]", dims, std::min(n, p)));
  }
  Centered c = mean_center(images);
  SvdResult f = svd(c.centered);

  PcaModel model;
  model.mean = std::move(c.mean);
  model.singular_values.assign(f.sigma.begin(), f.sigma.begin() + dims);
  model.components = Matrix(p, dims);
  model.coords = Matrix(n, dims);
  for (std::size_t k = 0; k < dims; ++k) {
    for (std::size_t r = 0; r < p; ++r) model.components(r, k) = f.v(r, k);
    for (std::size_t i = 0; i < n; ++i) model.coords(i, k) = f.u(i, k) * f.sigma[k];
  }
  return model;
}

std::vector<double> project_new(const PcaModel& model,
                                std::span<const double> image) {
  if (image.size() != model.mean.size()) {
    throw std::invalid_argument(fmt::format(
        "project_new: image length {} does not match model length {}",
        image.size(), model.mean.size()));
  }
  std::vector<double> out(model.dims(), 0.0);
  for (std::size_t r = 0; r < image.size(); ++r) {
    const double d = image[r] - model.mean[r];
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += d * model.components(r, k);
  }
  return out;
}

void write_coords_csv(const Matrix& coords, std::ostream& out) {
  if (coords.cols() < 2) {
    throw std::invalid_argument("coordinate export needs at least 2 columns");
  }
  out << "index,x,y\n";
  for (std::size_t i = 0; i < coords.rows(); ++i) {
    fmt::print(out, "{},{:.17g},{:.17g}\n", i, coords(i, 0), coords(i, 1));
  }
}

void write_coords_csv(const Matrix& coords, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_coords_csv(coords, out);
}

}  // namespace fairgrid::pca
