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
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "grid_oracles.h"
#include "test_util.h"

namespace fairgrid::grid {
namespace {

using testing::brute_force_min_cost;
using testing::random_matrix;
using testing::simulate_greedy;

std::vector<std::size_t> unwrap(const GridLayout& layout) {
  std::vector<std::size_t> out;
  for (const auto& a : layout.assignment) {
    EXPECT_TRUE(a.has_value());
    out.push_back(a.value_or(0));
  }
  return out;
}

TEST(GridSpecTest, DefaultSide) {
  EXPECT_EQ(default_side(1), 1u);
  EXPECT_EQ(default_side(3), 1u);
  EXPECT_EQ(default_side(4), 2u);
  EXPECT_EQ(default_side(600), 24u);
  EXPECT_EQ(default_side(625), 25u);
}

TEST(GridSpecTest, SpacingSpansBoundingBox) {
  const Matrix c = Matrix::from_rows({{-1, 2}, {3, 0}, {1, 10}, {0, 4}});
  const GridSpec s = make_spec(c, 2, 2);
  EXPECT_EQ(s.x_min, -1);
  EXPECT_EQ(s.x_max, 3);
  EXPECT_EQ(s.y_min, 0);
  EXPECT_EQ(s.y_max, 10);
  EXPECT_EQ(s.x_at(1), 3);
  EXPECT_EQ(s.y_at(1), 10);
}

TEST(GridSpecTest, RejectsTooManyCells) {
  const Matrix c(5, 2, 0.0);
  try {
    make_spec(c, 3, 2);
    FAIL();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("6 cells"), std::string::npos) << msg;
    EXPECT_NE(msg.find("5 available"), std::string::npos) << msg;
  }
  EXPECT_THROW(greedy_assign(c, 3, 2), std::invalid_argument);
  EXPECT_THROW(exact_assign(c, 3, 2), std::invalid_argument);
}

TEST(GreedyAssignTest, SingleImageSingleCell) {
  const GridLayout g = greedy_assign(Matrix::from_rows({{0.3, -0.2}}), 1, 1);
  ASSERT_EQ(g.assignment.size(), 1u);
  EXPECT_EQ(g.assignment[0], 0u);
}

TEST(GreedyAssignTest, CornersLandInTheirCells) {
  // Image index -> corner (x, y): cell (row, col) sits at (x_at(col), y_at(row)).
  const Matrix c = Matrix::from_rows({{1, 1}, {0, 0}, {1, 0}, {0, 1}});
  const GridLayout g = greedy_assign(c, 2, 2);
  EXPECT_EQ(g.assignment[g.cell(0, 0)], 1u);
  EXPECT_EQ(g.assignment[g.cell(0, 1)], 2u);
  EXPECT_EQ(g.assignment[g.cell(1, 0)], 3u);
  EXPECT_EQ(g.assignment[g.cell(1, 1)], 0u);
}

TEST(GreedyAssignTest, TiesGoToLowestIndex) {
  const Matrix c = Matrix::from_rows({{0, 0}, {1, 1}, {0, 0}, {1, 1}, {0.5, 0.5}});
  const GridLayout g = greedy_assign(c, 2, 2);
  // (0,0) cell first: images 0 and 2 tie, 0 wins; then (1,0) sits at x=0,y=1.
  EXPECT_EQ(g.assignment[g.cell(0, 0)], 0u);
  EXPECT_EQ(unwrap(g), simulate_greedy(c, 2, 2));
}

TEST(GreedyAssignTest, MatchesStepByStepSimulation) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> count(1, 25);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = count(rng);
    const Matrix c = random_matrix(n, 2, rng, -3.0, 3.0);
    const std::size_t side = default_side(n);
    const GridLayout g = greedy_assign(c, side, side);
    const auto got = unwrap(g);
    EXPECT_EQ(got, simulate_greedy(c, side, side));
    EXPECT_EQ(std::set<std::size_t>(got.begin(), got.end()).size(), got.size());
  }
}

TEST(GreedyAssignTest, RectangularGridsAreInjective) {
  std::mt19937_64 rng(12);
  const Matrix c = random_matrix(30, 2, rng);
  for (auto [r, k] : {std::pair{1, 7}, {5, 3}, {2, 15}, {6, 5}}) {
    const auto got = unwrap(greedy_assign(c, r, k));
    EXPECT_EQ(got, simulate_greedy(c, r, k));
    EXPECT_EQ(std::set<std::size_t>(got.begin(), got.end()).size(), got.size());
  }
}

TEST(ExactAssignTest, MatchesExhaustiveSearchForSmallInstances) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::size_t> count(1, 8);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = count(rng);
    const Matrix c = random_matrix(n, 2, rng);
    const std::size_t side = default_side(n);
    const GridLayout exact = exact_assign(c, side, side);
    const GridLayout greedy = greedy_assign(c, side, side);
    const auto got = unwrap(exact);
    EXPECT_EQ(std::set<std::size_t>(got.begin(), got.end()).size(), got.size());
    const double cost = assignment_cost(exact, c);
    EXPECT_NEAR(cost, brute_force_min_cost(c, exact.spec), 1e-12);
    EXPECT_LE(cost, assignment_cost(greedy, c) + 1e-12);
  }
}

TEST(ExactAssignTest, NeverWorseThanGreedyOnLargerGrids) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix c = random_matrix(60, 2, rng);
    const GridLayout exact = exact_assign(c, 7, 7);
    EXPECT_LE(assignment_cost(exact, c), assignment_cost(greedy_assign(c, 7, 7), c) + 1e-12);
  }
}

TEST(ExactAssignTest, SeparatedClustersAgreeWithGreedy) {
  // One tight cluster at every grid position.
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  Matrix c(9, 2);
  std::size_t i = 0;
  for (int y : {0, 2, 1}) {
    for (int x : {1, 0, 2}) {
      c(i, 0) = x * 10 + (x == 0 || x == 2 ? 0 : jitter(rng));
      c(i, 1) = y * 10 + (y == 0 || y == 2 ? 0 : jitter(rng));
      ++i;
    }
  }
  EXPECT_EQ(unwrap(exact_assign(c, 3, 3)), unwrap(greedy_assign(c, 3, 3)));
}

TEST(ExactAssignTest, RejectsOversizedGrid) {
  const Matrix c(65 * 65, 2, 0.0);
  EXPECT_THROW(exact_assign(c, 65, 65), std::invalid_argument);
}

GridLayout two_by_two() {
  return greedy_assign(Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {5, 5}}), 2, 2);
}

TEST(OverlayTest, AbsoluteErrorPerCell) {
  const GridLayout base = two_by_two();
  const std::vector<int> labels = {0, 1, 1, 0, 1};
  const std::vector<double> outputs = {0.2, 0.9, 0.4, 0.5, 0.0};
  const GridLayout g = overlay_values(base, labels, outputs);
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t s = *g.assignment[c];
    EXPECT_DOUBLE_EQ(*g.overlay[c], std::abs(labels[s] - outputs[s]));
  }
  const GridLayout hard = overlay_values(base, labels, outputs, true);
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t s = *hard.assignment[c];
    EXPECT_EQ(*hard.overlay[c], (outputs[s] >= 0.5) == (labels[s] == 1) ? 0.0 : 1.0);
  }
}

TEST(OverlayTest, UnassignedCellsStayEmpty) {
  GridLayout g = two_by_two();
  g.assignment[3].reset();
  g = overlay_values(g, std::vector<int>{0, 0, 0, 0, 0}, std::vector<double>{0, 0, 0, 0, 0});
  EXPECT_FALSE(g.overlay[3].has_value());
}

TEST(OverlayTest, RejectsBadInputs) {
  const GridLayout g = two_by_two();
  EXPECT_THROW(overlay_values(g, std::vector<int>{0, 1}, std::vector<double>{0, 1}),
               std::out_of_range);
  EXPECT_THROW(overlay_values(g, std::vector<int>{0, 1, 0}, std::vector<double>{0, 1}),
               std::invalid_argument);
  EXPECT_THROW(overlay_values(g, std::vector<int>{0, 2, 0, 0, 0},
                              std::vector<double>{0, 0, 0, 0, 0}),
               std::invalid_argument);
  EXPECT_THROW(overlay_values(g, std::vector<int>{0, 0, 0, 0, 0},
                              std::vector<double>{0, 1.5, 0, 0, 0}),
               std::invalid_argument);
}

TEST(RegionReportTest, HandComputedThreeByThree) {
  GridLayout g;
  g.spec.rows = g.spec.cols = 3;
  g.assignment.assign(9, 0);
  // Row-major overlay values 1..9 scaled by 0.1.
  for (int i = 0; i < 9; ++i) g.overlay.push_back((i + 1) * 0.1);
  const RegionReport r = region_report(g);
  EXPECT_EQ(r.overall.count, 9u);
  EXPECT_NEAR(r.overall.mean_error, 0.5, 1e-15);
  EXPECT_EQ(r.top.count, 3u);  // middle row excluded
  EXPECT_NEAR(r.top.mean_error, 0.2, 1e-15);
  EXPECT_NEAR(r.bottom.mean_error, 0.8, 1e-15);
  EXPECT_NEAR(r.left.mean_error, 0.4, 1e-15);
  EXPECT_NEAR(r.right.mean_error, 0.6, 1e-15);
  EXPECT_EQ(r.top_left.count, 1u);
  EXPECT_NEAR(r.top_left.mean_error, 0.1, 1e-15);
  EXPECT_NEAR(r.bottom_right.mean_error, 0.9, 1e-15);
}

TEST(RegionReportTest, EvenGridHalvesPartitionCells) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(0, 1);
  GridLayout g;
  g.spec.rows = 4;
  g.spec.cols = 6;
  g.assignment.assign(24, 0);
  double total = 0;
  for (int i = 0; i < 24; ++i) {
    g.overlay.push_back(u(rng));
    total += *g.overlay.back();
  }
  const RegionReport r = region_report(g);
  EXPECT_EQ(r.top.count + r.bottom.count, 24u);
  EXPECT_EQ(r.left.count + r.right.count, 24u);
  EXPECT_NEAR(r.top.mean_error * 12 + r.bottom.mean_error * 12, total, 1e-12);
  EXPECT_NEAR(r.top_left.mean_error * 6 + r.top_right.mean_error * 6, r.top.mean_error * 12,
              1e-12);
}

TEST(RegionReportTest, RequiresOverlayValues) {
  EXPECT_THROW(region_report(two_by_two()), std::invalid_argument);
}

TEST(LayoutCsvTest, RoundTrip) {
  testing::TempDir dir;
  const GridLayout g = overlay_values(two_by_two(), std::vector<int>{0, 1, 1, 0, 1},
                                      std::vector<double>{0.1, 0.7, 1.0 / 3, 0.5, 0});
  write_layout_csv(g, dir / "layout.csv");
  const GridLayout back = read_layout_csv(dir / "layout.csv", g.spec);
  EXPECT_EQ(back.assignment, g.assignment);
  EXPECT_EQ(back.overlay, g.overlay);
  std::ostringstream text;
  write_layout_csv(g, text);
  EXPECT_EQ(text.str().substr(0, text.str().find('\n')),
            "row,col,sample_index,x_grid,y_grid,overlay");
}

}  // namespace
}  // namespace fairgrid::grid
