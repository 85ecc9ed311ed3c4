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

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "test_util.h"

namespace fairgrid::pca {
namespace {

using testing::max_abs_diff;
using testing::random_matrix;

TEST(MeanCenterTest, ColumnMeansVanish) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(9, 5, rng, 0.0, 1.0);
  const Centered c = mean_center(x);
  for (std::size_t col = 0; col < 5; ++col) {
    double mean = 0.0, sum = 0.0;
    for (std::size_t r = 0; r < 9; ++r) {
      mean += x(r, col) / 9.0;
      sum += c.centered(r, col);
    }
    EXPECT_NEAR(c.mean[col], mean, 1e-15);
    EXPECT_NEAR(sum, 0.0, 1e-14);
  }
}

TEST(FitProjectTest, CollinearPointsGiveRootTwoScores) {
  const Matrix x = Matrix::from_rows({{1, 1}, {2, 2}, {3, 3}});
  const PcaModel m = fit_project(x, 2);
  const double s = std::sqrt(2.0);
  const double sign = m.coords(0, 0) < 0 ? 1.0 : -1.0;
  EXPECT_NEAR(m.coords(0, 0), -s * sign, 1e-10);
  EXPECT_NEAR(m.coords(1, 0), 0.0, 1e-10);
  EXPECT_NEAR(m.coords(2, 0), s * sign, 1e-10);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(m.coords(i, 1), 0.0, 1e-10);
  EXPECT_NEAR(m.singular_values[0], 2.0, 1e-12);
}

TEST(FitProjectTest, CoordsEqualCenteredTimesComponents) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(12, 20, rng, 0.0, 1.0);
    const PcaModel m = fit_project(x, 3);
    const Matrix expected = matmul(mean_center(x).centered, m.components);
    EXPECT_LE(max_abs_diff(m.coords, expected), 1e-10);
    // Orthonormal components and uncorrelated scores with variance sigma^2.
    const Matrix gram = matmul(m.components.transpose(), m.components);
    EXPECT_LE(max_abs_diff(gram, Matrix::identity(3)), 1e-10);
    const Matrix scores = matmul(m.coords.transpose(), m.coords);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) {
        const double want = a == b ? m.singular_values[a] * m.singular_values[a] : 0.0;
        EXPECT_NEAR(scores(a, b), want, 1e-9);
      }
    }
  }
}

TEST(FitProjectTest, FirstComponentMaximizesVariance) {
  // Points stretched along (1, 2) / sqrt(5): the first component aligns.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> big(0.0, 5.0), small(0.0, 0.1);
  Matrix x(200, 2);
  for (std::size_t i = 0; i < 200; ++i) {
    const double t = big(rng), u = small(rng);
    x(i, 0) = (t - 2 * u) / std::sqrt(5.0);
    x(i, 1) = (2 * t + u) / std::sqrt(5.0);
  }
  const PcaModel m = fit_project(x, 1);
  EXPECT_NEAR(std::abs(m.components(0, 0)), 1 / std::sqrt(5.0), 0.01);
  EXPECT_NEAR(std::abs(m.components(1, 0)), 2 / std::sqrt(5.0), 0.01);
}

TEST(FitProjectTest, ProjectNewReproducesTrainingScores) {
  std::mt19937_64 rng(4);
  const Matrix x = random_matrix(8, 6, rng);
  const PcaModel m = fit_project(x, 2);
  for (std::size_t i = 0; i < 8; ++i) {
    const std::vector<double> p = project_new(m, x.row(i));
    EXPECT_NEAR(p[0], m.coords(i, 0), 1e-12);
    EXPECT_NEAR(p[1], m.coords(i, 1), 1e-12);
  }
  EXPECT_THROW(project_new(m, std::vector<double>(5)), std::invalid_argument);
}

TEST(FitProjectTest, RejectsInvalidShapes) {
  EXPECT_THROW(fit_project(Matrix(1, 4, 1.0), 1), std::invalid_argument);
  EXPECT_THROW(fit_project(Matrix(3, 4, 1.0), 0), std::invalid_argument);
  EXPECT_THROW(fit_project(Matrix(3, 2, 1.0), 3), std::invalid_argument);
}

TEST(FitProjectTest, ShiftingAllImagesLeavesScoresUnchanged) {
  std::mt19937_64 rng(5);
  Matrix x = random_matrix(10, 7, rng);
  const PcaModel a = fit_project(x, 2);
  for (double& v : x.data()) v += 3.25;
  const PcaModel b = fit_project(x, 2);
  EXPECT_LE(max_abs_diff(a.coords, b.coords), 1e-10);
}

TEST(CoordsCsvTest, HeaderAndRoundTrip) {
  const Matrix coords = Matrix::from_rows({{0.1, -2.0 / 3.0}, {1e-300, 12345.678901234567}});
  std::ostringstream out;
  write_coords_csv(coords, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "index,x,y");
  std::getline(in, line);
  EXPECT_EQ(line, "0,0.10000000000000001,-0.66666666666666663");
  for (std::size_t i = 0; i < 2; ++i) {
    std::istringstream row(i == 0 ? line : (std::getline(in, line), line));
    std::string idx, xs, ys;
    std::getline(row, idx, ',');
    std::getline(row, xs, ',');
    std::getline(row, ys, ',');
    EXPECT_EQ(std::stoul(idx), i);
    EXPECT_EQ(std::stod(xs), coords(i, 0));
    EXPECT_EQ(std::stod(ys), coords(i, 1));
  }
}

}  // namespace
}  // namespace fairgrid::pca
