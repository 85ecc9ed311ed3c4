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

#include "fairgrid/synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fmt/format.h"

namespace fairgrid::synth {

namespace {

std::mt19937_64 image_rng(std::uint64_t seed, std::uint64_t index, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    stream};
  return std::mt19937_64(seq);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void SynthConfig::validate() const {
  require(n_per_cell >= 1, "synth.n_per_cell must be at least 1");
  require(tone_a >= kMinTone && tone_a <= kMaxTone,
          fmt::format("synth.tone_a = {} outside [{}, {}]", tone_a, kMinTone, kMaxTone));
  require(tone_b >= kMinTone && tone_b <= kMaxTone,
          fmt::format("synth.tone_b = {} outside [{}, {}]", tone_b, kMinTone, kMaxTone));
  require(tone_jitter >= 0.0 && std::isfinite(tone_jitter),
          "synth.tone_jitter must be finite and non-negative");
  require(noise_std >= 0.0 && std::isfinite(noise_std),
          "synth.noise_std must be finite and non-negative");
  require(image_side >= 16, fmt::format("synth.image_side = {} is below 16", image_side));
}

ImageTensor render_face(std::size_t side, double tone, bool eyes_open,
                        double noise_std, std::uint64_t noise_seed) {
  const double s = static_cast<double>(side);
  const double cx = (s - 1.0) / 2.0;
  const double cy = (s - 1.0) / 2.0;
  const double face_rx = 0.32 * s;
  const double face_ry = 0.42 * s;
  const double eye_y = std::round(0.42 * s);
  const double eye_dx = 0.15 * s;
  const double eye_rx = 0.08 * s;

  ImageTensor img(side, side, 1, tone);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const double fx = (x - cx) / face_rx;
      const double fy = (y - cy) / face_ry;
      if (fx * fx + fy * fy <= 1.0) img.at(y, x) += 0.1;
      for (const double ex : {cx - eye_dx, cx + eye_dx}) {
        const double dx = (x - ex) / eye_rx;
        const double dy = static_cast<double>(y) - eye_y;
        if (eyes_open) {
          // rows eye_y-1 .. eye_y+1
          if (std::abs(dy) <= 1.0 && dx * dx + (dy / 1.5) * (dy / 1.5) <= 1.0) {
            img.at(y, x) += 0.25;
          }
        } else if (dy == 0.0 && std::abs(dx) <= 1.0) {
          img.at(y, x) -= 0.2;
        }
      }
    }
  }
  if (noise_std > 0.0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> noise(0.0, noise_std);
    for (double& v : img.data()) v += noise(rng);
  }
  return clamp_unit(std::move(img));
}

Dataset generate(const SynthConfig& config) {
  config.validate();
  Dataset out;
  const std::size_t total = 4 * config.n_per_cell;
  out.images.reserve(total);
  out.records.reserve(total);
  const struct {
    const char* tag;
    double tone;
  } subpops[] = {{"A", config.tone_a}, {"B", config.tone_b}};
  std::size_t index = 0;
  for (const auto& sub : subpops) {
    for (int label = 0; label <= 1; ++label) {
      for (std::size_t i = 0; i < config.n_per_cell; ++i, ++index) {
        std::mt19937_64 rng = image_rng(config.rng_seed, index, 0);
        std::normal_distribution<double> jitter(0.0, 1.0);
        const double tone = std::clamp(sub.tone + config.tone_jitter * jitter(rng),
                                       kMinTone, kMaxTone);
        const std::uint64_t noise_seed = rng();
        out.images.push_back(render_face(config.image_side, tone, label == 0,
                                         config.noise_std, noise_seed));
        ingest::SampleRecord rec;
        rec.image_path = fmt::format("images/img_{:05d}.png", index);
        rec.label = label;
        rec.split = sub.tag;
        out.records.push_back(std::move(rec));
      }
    }
  }
  return out;
}

Split split_biased(const std::vector<ingest::SampleRecord>& records,
                   const std::string& train_subpop, double test_fraction,
                   std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument(
        fmt::format("test_fraction = {} outside [0, 1)", test_fraction));
  }
  std::vector<std::size_t> by_class[2];
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split.value_or("") == train_subpop) {
      by_class[records[i].label].push_back(i);
    } else {
      others.push_back(i);
    }
  }
  if (by_class[0].empty() && by_class[1].empty()) {
    throw std::invalid_argument(
        fmt::format("subpopulation '{}' has no records", train_subpop));
  }
  if (others.empty()) {
    throw std::invalid_argument(
        fmt::format("no subpopulation other than '{}' present", train_subpop));
  }
  Split split;
  std::mt19937_64 rng = image_rng(seed, 0, 4);
  std::vector<std::size_t> held;
  for (auto& members : by_class) {
    std::vector<std::size_t> order = members;
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(order.size())));
    held.insert(held.end(), order.begin(), order.begin() + n_test);
    split.train.insert(split.train.end(), order.begin() + n_test, order.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(held.begin(), held.end());
  split.test = std::move(held);
  split.test.insert(split.test.end(), others.begin(), others.end());
  return split;
}

}  // namespace fairgrid::synth
