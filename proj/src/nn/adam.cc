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

#include "fairgrid/nn/adam.h"

#include <cmath>
#include <stdexcept>

#include "fmt/format.h"

namespace fairgrid::nn {

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::vector<double>> grads, AdamState& state,
               const AdamConfig& config) {
  if (grads.size() != params.size()) {
    throw std::invalid_argument(fmt::format(
        "adam_step: {} parameter tensors but {} gradients", params.size(), grads.size()));
  }
  if (state.m.empty() && state.v.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimizer state does not match parameters");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].size() != params[k].size() || state.m[k].size() != params[k].size() ||
        state.v[k].size() != params[k].size()) {
      throw std::invalid_argument(fmt::format(
          "adam_step: tensor {} has {} values, gradient {}, state {}/{}", k,
          params[k].size(), grads[k].size(), state.m[k].size(), state.v[k].size()));
    }
  }

  ++state.step;
  const auto t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& m = state.m[k];
    auto& v = state.v[k];
    const auto& g = grads[k];
    for (std::size_t i = 0; i < params[k].size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      params[k][i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

}  // namespace fairgrid::nn
