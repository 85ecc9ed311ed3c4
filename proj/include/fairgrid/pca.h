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

#ifndef FAIRGRID_PCA_H_
#define FAIRGRID_PCA_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "fairgrid/numerics/matrix.h"

namespace fairgrid::pca {

// Principal-subspace projection of an N x P image matrix.
struct PcaModel {
  std::vector<double> mean;             // length P
  Matrix components;                    // P x j, orthonormal columns
  std::vector<double> singular_values;  // length j, non-increasing
  Matrix coords;                        // N x j row scores

  std::size_t dims() const { return singular_values.size(); }
};

struct Centered {
  Matrix centered;
  std::vector<double> mean;
};

// Subtracts the column-wise mean image from every row.
Centered mean_center(const Matrix& images);

// Mean-centers `images`, factorizes with svd() and keeps the leading `dims`
// directions. coords = U_j * diag(sigma_j) (equivalently centered * V_j).
// Requires N >= 2 and 1 <= dims <= min(N, P).
PcaModel fit_project(const Matrix& images, std::size_t dims = 2);

// (image - mean) * components.
std::vector<double> project_new(const PcaModel& model,
                                std::span<const double> image);

// `index,x,y` table of the first two score columns, 17 significant digits.
void write_coords_csv(const Matrix& coords, std::ostream& out);
void write_coords_csv(const Matrix& coords, const std::filesystem::path& path);

}  // namespace fairgrid::pca

#endif  // FAIRGRID_PCA_H_
