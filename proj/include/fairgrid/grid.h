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

#ifndef FAIRGRID_GRID_H_
#define FAIRGRID_GRID_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fairgrid/numerics/matrix.h"

namespace fairgrid::grid {

// Uniform grid laid over the bounding box of the projected coordinates.
// Column c sits at x = x_min + c * d1, row r at y = y_min + r * d2. Row 0 is
// the top row of a rendered montage.
struct GridSpec {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  std::size_t cells() const { return rows * cols; }
  double x_at(std::size_t col) const { return x_min + static_cast<double>(col) * d1; }
  double y_at(std::size_t row) const { return y_min + static_cast<double>(row) * d2; }
};

// Bounds from the first two columns of `coords`. Throws if the grid is empty
// or has more cells than there are samples.
GridSpec make_spec(const Matrix& coords, std::size_t rows, std::size_t cols);

// Largest square side with side * side <= n.
std::size_t default_side(std::size_t n);

// Cell -> sample assignment and per-cell overlay; cells are row-major.
struct GridLayout {
  GridSpec spec;
  std::vector<std::optional<std::size_t>> assignment;
  std::vector<std::optional<double>> overlay;

  std::size_t cell(std::size_t row, std::size_t col) const {
    return row * spec.cols + col;
  }
};

// Walks grid positions with x in the outer loop and y in the inner loop and
// gives each position the closest unused sample (Euclidean distance, ties to
// the lowest index).
GridLayout greedy_assign(const Matrix& coords, std::size_t rows,
                         std::size_t cols);

// Minimum total squared cell-to-sample distance via shortest augmenting
// paths. Limited to kMaxExactCells cells.
inline constexpr std::size_t kMaxExactCells = 4096;
GridLayout exact_assign(const Matrix& coords, std::size_t rows,
                        std::size_t cols);

// Sum of squared distances between each assigned cell and its sample.
double assignment_cost(const GridLayout& layout, const Matrix& coords);

// overlay = |label - output| per assigned cell. With hard_labels the output
// is first thresholded at 0.5.
GridLayout overlay_values(GridLayout layout, std::span<const int> labels,
                          std::span<const double> outputs,
                          bool hard_labels = false);

struct RegionStats {
  std::size_t count = 0;
  double mean_error = 0.0;  // 0 when count == 0
};

// Halves exclude the middle row/column when the grid side is odd.
struct RegionReport {
  RegionStats overall;
  RegionStats top, bottom, left, right;
  RegionStats top_left, top_right, bottom_left, bottom_right;
};

RegionReport region_report(const GridLayout& layout);

// `row,col,sample_index,x_grid,y_grid,overlay`, empty cells omitted, overlay
// blank when unset.
void write_layout_csv(const GridLayout& layout, std::ostream& out);
void write_layout_csv(const GridLayout& layout,
                      const std::filesystem::path& path);
GridLayout read_layout_csv(const std::filesystem::path& path,
                           const GridSpec& spec);

}  // namespace fairgrid::grid

#endif  // FAIRGRID_GRID_H_
