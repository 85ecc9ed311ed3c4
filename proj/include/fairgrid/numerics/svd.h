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

#ifndef FAIRGRID_NUMERICS_SVD_H_
#define FAIRGRID_NUMERICS_SVD_H_

#include <stdexcept>
#include <vector>

#include "fairgrid/numerics/matrix.h"

namespace fairgrid {

// Thin factorization m = u * diag(sigma) * v^T with r = min(rows, cols).
//
// sigma is non-increasing, u (rows x r) and v (cols x r) have orthonormal
// columns, and every column of v has its largest-magnitude entry positive
// (ties go to the earliest index), with the matching u column flipped along.
struct SvdResult {
  Matrix u;
  std::vector<double> sigma;
  Matrix v;
  int sweeps = 0;
};

struct SvdOptions {
  // A column pair is treated as orthogonal once
  // |<a_p, a_q>| <= tolerance * ||a_p|| * ||a_q||.
  double tolerance = 1e-12;
  int max_sweeps = 1000;
};

class SvdNotConverged : public std::runtime_error {
 public:
  SvdNotConverged(int sweeps, double residual);
  int sweeps() const { return sweeps_; }
  // Largest normalized column inner product left after the final sweep.
  double residual() const { return residual_; }

 private:
  int sweeps_;
  double residual_;
};

// One-sided Jacobi (Hestenes) SVD on the side with fewer columns, using a
// round-robin pair ordering. Pairs within a round touch disjoint columns and
// are processed in parallel; the result does not depend on the thread count.
//
// Throws std::invalid_argument for empty or non-finite input and
// SvdNotConverged if max_sweeps is exhausted.
SvdResult svd(const Matrix& m, const SvdOptions& options = {});

}  // namespace fairgrid

#endif  // FAIRGRID_NUMERICS_SVD_H_
