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

#include "fairgrid/numerics/svd.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>

#include "fmt/format.h"

namespace fairgrid {

SvdNotConverged::SvdNotConverged(int sweeps, double residual)
    : std::runtime_error(fmt::format(
          "svd did not converge after {} sweeps (residual {:.3e})", sweeps,
          residual)),
      sweeps_(sweeps),
      residual_(residual) {}

namespace {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

// Circle-method tournament: round r of (players - 1) pairs every column with
// exactly one other; all pairs appear once per sweep.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> round_robin(
    std::size_t n) {
  const std::size_t players = n + (n % 2);
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rounds;
  if (players < 2) return rounds;
  const std::size_t ring = players - 1;
  for (std::size_t r = 0; r < ring; ++r) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    auto add = [&](std::size_t a, std::size_t b) {
      if (a >= n || b >= n) return;
      pairs.emplace_back(std::min(a, b), std::max(a, b));
    };
    add(players - 1, r);
    for (std::size_t k = 1; k < players / 2; ++k)
      add((r + k) % ring, (r + ring - k) % ring);
    rounds.push_back(std::move(pairs));
  }
  return rounds;
}

}  // namespace

SvdResult svd(const Matrix& a, const SvdOptions& options) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("svd of an empty matrix");
  }
  if (!a.all_finite()) {
    throw std::invalid_argument("svd input contains non-finite values");
  }

  // Work on B = A (rows >= cols) or B = A^T, so B is m x n with m >= n.
  const bool transposed = a.rows() < a.cols();
  const std::size_t m = transposed ? a.cols() : a.rows();
  const std::size_t n = transposed ? a.rows() : a.cols();

  // Column-major copies: w holds the columns of B, v accumulates rotations.
  std::vector<double> w(m * n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < m; ++i)
      w[k * m + i] = transposed ? a(k, i) : a(i, k);
  std::vector<double> v(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) v[k * n + k] = 1.0;

  const double eps = std::numeric_limits<double>::epsilon();
  const double norm_a = a.frobenius_norm();
  // Columns below this squared norm carry no information above rounding.
  const double negligible = std::pow(static_cast<double>(m) * eps * norm_a, 2);

  const auto rounds = round_robin(n);
  std::vector<double> sq_norm(n);
  int sweep = 0;
  double residual = 0.0;
  for (;;) {
    if (sweep >= options.max_sweeps) throw SvdNotConverged(sweep, residual);
    ++sweep;
    for (std::size_t k = 0; k < n; ++k)
      sq_norm[k] = dot(&w[k * m], &w[k * m], m);

    residual = 0.0;
    bool rotated = false;
    for (const auto& pairs : rounds) {
      const auto npairs = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(static) reduction(max : residual) \
    reduction(|| : rotated)
      for (std::int64_t t = 0; t < npairs; ++t) {
        const auto [p, q] = pairs[static_cast<std::size_t>(t)];
        const double alpha = sq_norm[p];
        const double beta = sq_norm[q];
        if (alpha <= negligible || beta <= negligible) continue;
        double* wp = &w[p * m];
        double* wq = &w[q * m];
        const double gamma = dot(wp, wq, m);
        const double ratio = std::fabs(gamma) / std::sqrt(alpha * beta);
        residual = std::max(residual, ratio);
        if (ratio <= options.tolerance) continue;
        rotated = true;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double tan = std::copysign(1.0, zeta) /
                           (std::fabs(zeta) + std::hypot(1.0, zeta));
        const double cos = 1.0 / std::hypot(1.0, tan);
        const double sin = cos * tan;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = wp[i], xq = wq[i];
          wp[i] = cos * xp - sin * xq;
          wq[i] = sin * xp + cos * xq;
        }
        double* vp = &v[p * n];
        double* vq = &v[q * n];
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = vp[i], xq = vq[i];
          vp[i] = cos * xp - sin * xq;
          vq[i] = sin * xp + cos * xq;
        }
        sq_norm[p] = alpha - tan * gamma;
        sq_norm[q] = beta + tan * gamma;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t k = 0; k < n; ++k) {
    Matrix col(m, 1, std::vector<double>(w.begin() + k * m, w.begin() + (k + 1) * m));
    sigma[k] = col.frobenius_norm();
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return sigma[x] > sigma[y];
  });

  // Left vectors of B (length m) and right vectors of B (length n), sorted.
  std::vector<std::vector<double>> left(n, std::vector<double>(m));
  std::vector<std::vector<double>> right(n, std::vector<double>(n));
  std::vector<double> sorted_sigma(n);
  const double sigma_floor =
      static_cast<double>(std::max(m, n)) * eps * sigma[order[0]];
  std::vector<std::size_t> deficient;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    sorted_sigma[k] = sigma[src];
    std::copy_n(&v[src * n], n, right[k].begin());
    if (sigma[src] > sigma_floor && sigma[src] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) left[k][i] = w[src * m + i] / sigma[src];
    } else {
      deficient.push_back(k);
    }
  }

  // Complete the left basis for (numerically) zero singular values with
  // unit vectors orthogonalized against the accepted columns.
  if (!deficient.empty()) {
    std::vector<bool> accepted(n, true);
    for (std::size_t k : deficient) accepted[k] = false;
    std::size_t candidate = 0;
    for (std::size_t k : deficient) {
      for (; candidate < m; ++candidate) {
        std::vector<double> x(m, 0.0);
        x[candidate] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
          for (std::size_t j = 0; j < n; ++j) {
            if (!accepted[j]) continue;
            const double proj = dot(left[j].data(), x.data(), m);
            for (std::size_t i = 0; i < m; ++i) x[i] -= proj * left[j][i];
          }
        }
        const double len = std::sqrt(dot(x.data(), x.data(), m));
        if (len > 0.5) {
          for (std::size_t i = 0; i < m; ++i) left[k][i] = x[i] / len;
          accepted[k] = true;
          ++candidate;
          break;
        }
      }
    }
  }

  // Assemble A's factors and fix the sign on A's right vectors.
  const std::size_t r = n;
  auto& u_cols = transposed ? right : left;
  auto& v_cols = transposed ? left : right;
  for (std::size_t k = 0; k < r; ++k) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v_cols[k].size(); ++i)
      if (std::fabs(v_cols[k][i]) > std::fabs(v_cols[k][best])) best = i;
    if (v_cols[k][best] < 0.0) {
      for (double& x : v_cols[k]) x = -x;
      for (double& x : u_cols[k]) x = -x;
    }
  }

  SvdResult result;
  result.sweeps = sweep;
  result.sigma = std::move(sorted_sigma);
  result.u = Matrix(a.rows(), r);
  result.v = Matrix(a.cols(), r);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < a.rows(); ++i) result.u(i, k) = u_cols[k][i];
    for (std::size_t i = 0; i < a.cols(); ++i) result.v(i, k) = v_cols[k][i];
  }
  return result;
}

}  // namespace fairgrid
