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

#ifndef FAIRGRID_NN_ADAM_H_
#define FAIRGRID_NN_ADAM_H_

#include <cstdint>
#include <span>
#include <vector>

namespace fairgrid::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment estimates, one entry per parameter tensor.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t step = 0;
};

// One bias-corrected Adam update:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
// A fresh (empty) state is sized on first use. Throws std::invalid_argument
// when grads or state do not match the parameter shapes.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::vector<double>> grads, AdamState& state,
               const AdamConfig& config);

}  // namespace fairgrid::nn

#endif  // FAIRGRID_NN_ADAM_H_
