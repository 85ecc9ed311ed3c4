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

#include "fairgrid/grid.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fmt/format.h"
#include "fmt/ostream.h"

namespace fairgrid::grid {

namespace {

void check_coords(const Matrix& coords) {
  if (coords.cols() < 2) {
    throw std::invalid_argument(fmt::format(
        "grid coordinates need 2 columns, got {}", coords.cols()));
  }
  if (!coords.all_finite()) {
    throw std::invalid_argument("grid coordinates contain non-finite values");
  }
}

GridLayout empty_layout(const GridSpec& spec) {
  GridLayout layout;
  layout.spec = spec;
  layout.assignment.assign(spec.cells(), std::nullopt);
  layout.overlay.assign(spec.cells(), std::nullopt);
  return layout;
}

double squared_distance(const Matrix& coords, std::size_t i, double x,
                        double y) {
  const double dx = coords(i, 0) - x;
  const double dy = coords(i, 1) - y;
  return dx * dx + dy * dy;
}

void accumulate(RegionStats& s, double v) {
  ++s.count;
  s.mean_error += v;
}

void finish(RegionStats& s) {
  if (s.count > 0) s.mean_error /= static_cast<double>(s.count);
}

}  // namespace

GridSpec make_spec(const Matrix& coords, std::size_t rows, std::size_t cols) {
  check_coords(coords);
  if (rows == 0 || cols == 0) {
    throw std::invalid_argument(
        fmt::format("grid must have at least one cell, got {}x{}", rows, cols));
  }
  if (rows * cols > coords.rows()) {
    throw std::invalid_argument(
        fmt::format("grid of {}x{} = {} cells exceeds the {} available images",
                    rows, cols, rows * cols, coords.rows()));
  }
  GridSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  const std::vector<double> xs = coords.column(0);
  const std::vector<double> ys = coords.column(1);
  const auto [x_lo, x_hi] = std::minmax_element(xs.begin(), xs.end());
  const auto [y_lo, y_hi] = std::minmax_element(ys.begin(), ys.end());
  spec.x_min = *x_lo;
  spec.x_max = *x_hi;
  spec.y_min = *y_lo;
  spec.y_max = *y_hi;
  spec.d1 = (spec.x_max - spec.x_min) / static_cast<double>(std::max<std::size_t>(cols - 1, 1));
  spec.d2 = (spec.y_max - spec.y_min) / static_cast<double>(std::max<std::size_t>(rows - 1, 1));
  return spec;
}

std::size_t default_side(std::size_t n) {
  auto side = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (side * side > n) --side;
  while ((side + 1) * (side + 1) <= n) ++side;
  return side;
}

GridLayout greedy_assign(const Matrix& coords, std::size_t rows,
                         std::size_t cols) {
  GridLayout layout = empty_layout(make_spec(coords, rows, cols));
  const GridSpec& spec = layout.spec;
  const std::size_t n = coords.rows();
  std::vector<bool> used(n, false);
  for (std::size_t col = 0; col < spec.cols; ++col) {
    const double gx = spec.x_at(col);
    for (std::size_t row = 0; row < spec.rows; ++row) {
      const double gy = spec.y_at(row);
      double best_dist = std::numeric_limits<double>::infinity();
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double dist = std::sqrt(squared_distance(coords, i, gx, gy));
        if (dist < best_dist) {
          best_dist = dist;
          best = i;
        }
      }
      used[best] = true;
      layout.assignment[layout.cell(row, col)] = best;
    }
  }
  return layout;
}

GridLayout exact_assign(const Matrix& coords, std::size_t rows,
                        std::size_t cols) {
  GridLayout layout = empty_layout(make_spec(coords, rows, cols));
  const GridSpec& spec = layout.spec;
  const std::size_t cells = spec.cells();
  if (cells > kMaxExactCells) {
    throw std::invalid_argument(fmt::format(
        "exact_assign supports at most {} cells, got {}", kMaxExactCells, cells));
  }
  const std::size_t m = coords.rows();
  auto cost = [&](std::size_t cell, std::size_t image) {
    return squared_distance(coords, image, spec.x_at(cell % spec.cols),
                            spec.y_at(cell / spec.cols));
  };

  // Shortest augmenting path with potentials; cells are rows (1-based),
  // images are columns (1-based), column 0 is the virtual source.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(cells + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  for (std::size_t row = 1; row <= cells; ++row) {
    owner[0] = row;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < minv[j]) {
          minv[j] = reduced;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= m; ++j) {
    if (owner[j] != 0) layout.assignment[owner[j] - 1] = j - 1;
  }
  return layout;
}

double assignment_cost(const GridLayout& layout, const Matrix& coords) {
  double total = 0.0;
  for (std::size_t row = 0; row < layout.spec.rows; ++row) {
    for (std::size_t col = 0; col < layout.spec.cols; ++col) {
      const auto& a = layout.assignment[layout.cell(row, col)];
      if (a) {
        total += squared_distance(coords, *a, layout.spec.x_at(col),
                                  layout.spec.y_at(row));
      }
    }
  }
  return total;
}

GridLayout overlay_values(GridLayout layout, std::span<const int> labels,
                          std::span<const double> outputs, bool hard_labels) {
  if (labels.size() != outputs.size()) {
    throw std::invalid_argument(fmt::format(
        "overlay_values: {} labels but {} outputs", labels.size(), outputs.size()));
  }
  for (std::size_t c = 0; c < layout.assignment.size(); ++c) {
    const auto& a = layout.assignment[c];
    if (!a) {
      layout.overlay[c] = std::nullopt;
      continue;
    }
    if (*a >= labels.size()) {
      throw std::out_of_range(fmt::format(
          "overlay_values: sample index {} out of range ({} samples)", *a,
          labels.size()));
    }
    const int y = labels[*a];
    double o = outputs[*a];
    if ((y != 0 && y != 1) || !(o >= 0.0 && o <= 1.0)) {
      throw std::invalid_argument(fmt::format(
          "overlay_values: sample {} has label {} / output {}", *a, y, o));
    }
    if (hard_labels) o = o >= 0.5 ? 1.0 : 0.0;
    layout.overlay[c] = std::fabs(static_cast<double>(y) - o);
  }
  return layout;
}

RegionReport region_report(const GridLayout& layout) {
  RegionReport r;
  const std::size_t rows = layout.spec.rows, cols = layout.spec.cols;
  for (std::size_t row = 0; row < rows; ++row) {
    const bool top = row < rows / 2;
    const bool bottom = row >= rows - rows / 2;
    for (std::size_t col = 0; col < cols; ++col) {
      const auto& v = layout.overlay[layout.cell(row, col)];
      if (!v) continue;
      const bool left = col < cols / 2;
      const bool right = col >= cols - cols / 2;
      accumulate(r.overall, *v);
      if (top) accumulate(r.top, *v);
      if (bottom) accumulate(r.bottom, *v);
      if (left) accumulate(r.left, *v);
      if (right) accumulate(r.right, *v);
      if (top && left) accumulate(r.top_left, *v);
      if (top && right) accumulate(r.top_right, *v);
      if (bottom && left) accumulate(r.bottom_left, *v);
      if (bottom && right) accumulate(r.bottom_right, *v);
    }
  }
  if (r.overall.count == 0) {
    throw std::invalid_argument("region_report: layout has no overlay values");
  }
  for (RegionStats* s : {&r.overall, &r.top, &r.bottom, &r.left, &r.right,
                         &r.top_left, &r.top_right, &r.bottom_left,
                         &r.bottom_right}) {
    finish(*s);
  }
  return r;
}

void write_layout_csv(const GridLayout& layout, std::ostream& out) {
  out << "row,col,sample_index,x_grid,y_grid,overlay\n";
  for (std::size_t row = 0; row < layout.spec.rows; ++row) {
    for (std::size_t col = 0; col < layout.spec.cols; ++col) {
      const std::size_t c = layout.cell(row, col);
      if (!layout.assignment[c]) continue;
      fmt::print(out, "{},{},{},{:.17g},{:.17g},", row, col,
                 *layout.assignment[c], layout.spec.x_at(col),
                 layout.spec.y_at(row));
      if (layout.overlay[c]) fmt::print(out, "{:.17g}", *layout.overlay[c]);
      out << '\n';
    }
  }
}

void write_layout_csv(const GridLayout& layout,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_layout_csv(layout, out);
}

GridLayout read_layout_csv(const std::filesystem::path& path,
                           const GridSpec& spec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  GridLayout layout = empty_layout(spec);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 6) {
      throw std::runtime_error(fmt::format("{}:{}: expected 6 fields, got {}",
                                           path.string(), line_no, fields.size()));
    }
    try {
      const std::size_t row = std::stoul(fields[0]);
      const std::size_t col = std::stoul(fields[1]);
      if (row >= spec.rows || col >= spec.cols) throw std::out_of_range("cell");
      const std::size_t c = layout.cell(row, col);
      layout.assignment[c] = std::stoul(fields[2]);
      if (!fields[5].empty()) layout.overlay[c] = std::stod(fields[5]);
    } catch (const std::logic_error&) {
      throw std::runtime_error(
          fmt::format("{}:{}: malformed layout row", path.string(), line_no));
    }
  }
  return layout;
}

}  // namespace fairgrid::grid
