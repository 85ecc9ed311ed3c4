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

#include <cmath>
#include <random>
#include <sstream>

#include "fairgrid/nn/adam.h"
#include "fairgrid/nn/serialize.h"
#include "fairgrid/nn/train.h"
#include "gradient_check.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairgrid::nn {
namespace {

using testing::random_input;
using testing::randomize_batchnorm;
using testing::tiny_arch;

// ---- Adam ----------------------------------------------------------------

TEST(AdamTest, FirstStepMagnitude) {
  const AdamConfig cfg;
  for (double g : {1e-3, 0.5, -2.0, 1e-9}) {
    std::vector<double> p = {1.0};
    const std::vector<std::span<double>> params = {p};
    const std::vector<std::vector<double>> grads = {{g}};
    AdamState state;
    adam_step(params, grads, state, cfg);
    const double want = cfg.learning_rate * std::abs(g) / (std::abs(g) + cfg.epsilon);
    EXPECT_NEAR(std::abs(p[0] - 1.0), want, 1e-12) << g;
    EXPECT_EQ(state.step, 1);
  }
}

TEST(AdamTest, MatchesIndependentRecurrence) {
  AdamConfig cfg;
  cfg.learning_rate = 0.01;
  std::vector<double> p = {0.3, -0.7}, ref = p, m(2, 0.0), v(2, 0.0);
  const std::vector<std::span<double>> params = {p};
  AdamState state;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (int t = 1; t <= 25; ++t) {
    const std::vector<std::vector<double>> grads = {{n(rng), n(rng)}};
    adam_step(params, grads, state, cfg);
    for (std::size_t i = 0; i < 2; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * grads[0][i];
      v[i] = 0.999 * v[i] + 0.001 * grads[0][i] * grads[0][i];
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v[i] / (1 - std::pow(0.999, t));
      ref[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
  }
  EXPECT_NEAR(p[0], ref[0], 1e-12);
  EXPECT_NEAR(p[1], ref[1], 1e-12);
}

TEST(AdamTest, ZeroLearningRateLeavesParameters) {
  AdamConfig cfg;
  cfg.learning_rate = 0.0;
  std::vector<double> p = {0.25, 4.0};
  const std::vector<std::span<double>> params = {p};
  AdamState state;
  adam_step(params, std::vector<std::vector<double>>{{3.0, -1.0}}, state, cfg);
  EXPECT_EQ(p, (std::vector<double>{0.25, 4.0}));
}

TEST(AdamTest, RejectsMismatchedGradients) {
  std::vector<double> p = {1.0, 2.0};
  const std::vector<std::span<double>> params = {p};
  AdamState state;
  EXPECT_THROW(adam_step(params, std::vector<std::vector<double>>{{1.0}}, state, {}),
               std::invalid_argument);
  EXPECT_THROW(adam_step(params, std::vector<std::vector<double>>{}, state, {}),
               std::invalid_argument);
}

// ---- Training ------------------------------------------------------------

// Bright-left versus bright-right 8x8 images.
LabeledImages toy_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  LabeledImages data;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    ImageTensor img(8, 8, 1);
    for (std::size_t y = 0; y < 8; ++y) {
      for (std::size_t x = 0; x < 8; ++x) {
        const bool lit = label ? x >= 4 : x < 4;
        img.at(y, x) = std::clamp((lit ? 0.8 : 0.2) + noise(rng), 0.0, 1.0);
      }
    }
    data.images.push_back(img);
    data.labels.push_back(label);
  }
  return data;
}

ArchConfig toy_arch() {
  ArchConfig arch;
  arch.input = {1, 8, 8};
  arch.conv1_channels = 2;
  arch.conv2_channels = 2;
  arch.dense1 = 8;
  arch.dense2 = 4;
  arch.pool = 1;
  return arch;
}

TEST(TrainTest, LearnsSeparableProblem) {
  const LabeledImages data = toy_data(64, 2);
  Model model = make_cnn(toy_arch(), 3);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.01;
  cfg.rng_seed = 4;
  const TrainResult r = train(model, data, cfg, std::nullopt);
  ASSERT_EQ(r.history.size(), 30u);
  EXPECT_LT(r.history.back().loss, r.history.front().loss);
  EXPECT_EQ(model.mode(), Mode::kInference);
  const Metrics m = evaluate(model, toy_data(40, 5));
  EXPECT_GE(m.accuracy, 0.95);
  EXPECT_EQ(m.count, 40u);
}

TEST(TrainTest, BitIdenticalUnderSeed) {
  const LabeledImages data = toy_data(20, 6);
  augment::AugmentConfig aug;
  auto run = [&]() {
    Model model = make_cnn(toy_arch(), 7);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 6;
    cfg.rng_seed = 8;
    aug.rng_seed = 8;
    train(model, data, cfg, aug);
    std::vector<double> flat;
    for (auto p : std::as_const(model).parameters()) flat.insert(flat.end(), p.begin(), p.end());
    return flat;
  };
  EXPECT_EQ(run(), run());
}

TEST(TrainTest, BatchNormModelSkipsSingletonBatches) {
  ArchConfig arch = toy_arch();
  arch.batchnorm = true;
  Model model = make_cnn(arch, 9);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;  // 9 samples -> last batch of 1
  EXPECT_NO_THROW(train(model, toy_data(9, 10), cfg, std::nullopt));
}

TEST(TrainTest, ValidatesInputs) {
  Model model = make_cnn(toy_arch(), 11);
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(train(model, toy_data(4, 12), cfg, std::nullopt), std::invalid_argument);
  LabeledImages wrong = toy_data(4, 12);
  wrong.images[1] = ImageTensor(9, 9, 1);
  EXPECT_THROW(train(model, wrong, TrainConfig{}, std::nullopt), std::invalid_argument);
}

TEST(PredictTest, PredictAllMatchesSingleSamplePasses) {
  Model model = make_cnn(tiny_arch(), 13);
  randomize_batchnorm(model, 14);
  std::mt19937_64 rng(15);
  std::vector<ImageTensor> images;
  for (int i = 0; i < 70; ++i) images.push_back(testing::random_image(14, 14, 2, rng));
  const std::vector<double> all = predict_all(model, images);
  ASSERT_EQ(all.size(), 70u);
  for (std::size_t i = 0; i < images.size(); i += 13) {
    EXPECT_NEAR(all[i], model.predict(to_tensor(images[i])).data()[0], 1e-15);
  }
}

// ---- Saliency ------------------------------------------------------------

Model logistic_model(const Shape& in, std::uint64_t seed) {
  Model model(in, {Flatten{}, make_dense(in.size(), 1), Sigmoid{}});
  initialize(model, seed);
  std::get<Dense>(model.mutable_layers()[1]).bias = {0.3};
  return model;
}

TEST(SaliencyTest, LogisticModelGivesNormalizedAbsWeights) {
  const Model model = logistic_model({1, 6, 5}, 16);
  std::mt19937_64 rng(17);
  const ImageTensor img = testing::random_image(6, 5, 1, rng);
  const ImageTensor s = input_saliency(model, img);
  const auto& w = std::get<Dense>(model.layers()[1]).weight;
  double lo = 1e300, hi = 0.0;
  for (double v : w) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(s.data()[i], (std::abs(w[i]) - lo) / (hi - lo), 1e-8);
  }
}

TEST(SaliencyTest, InvariantToBiasShift) {
  Model model = logistic_model({3, 4, 4}, 18);
  std::mt19937_64 rng(19);
  const ImageTensor img = testing::random_image(4, 4, 3, rng);
  const ImageTensor a = input_saliency(model, img);
  std::get<Dense>(model.mutable_layers()[1]).bias[0] += 1.7;
  const ImageTensor b = input_saliency(model, img);
  for (std::size_t i = 0; i < a.data().size(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], 1e-8);
}

TEST(SaliencyTest, MatchesFiniteDifferencePixelSensitivity) {
  Model model = make_cnn(tiny_arch(), 22);
  randomize_batchnorm(model, 23);
  std::mt19937_64 rng(24);
  ImageTensor img = testing::random_image(14, 14, 2, rng);
  const ImageTensor s = input_saliency(model, img);
  const double h = 1e-6;  // a kink can sit within 1e-5 of a pixel
  auto out = [&](const ImageTensor& im) { return model.predict(to_tensor(im)).data()[0]; };
  ImageTensor raw(14, 14, 1);
  for (std::size_t y = 0; y < 14; ++y) {
    for (std::size_t x = 0; x < 14; ++x) {
      double best = 0.0;
      for (std::size_t c = 0; c < 2; ++c) {
        const double saved = img.at(y, x, c);
        img.at(y, x, c) = saved + h;
        const double up = out(img);
        img.at(y, x, c) = saved - h;
        const double down = out(img);
        img.at(y, x, c) = saved;
        best = std::max(best, std::abs((up - down) / (2 * h)));
      }
      raw.at(y, x) = best;
    }
  }
  const auto [lo, hi] = std::minmax_element(raw.data().begin(), raw.data().end());
  const double min = *lo, range = *hi - *lo;
  ASSERT_GT(range, 0.0) << "network output does not depend on the input";
  for (std::size_t i = 0; i < raw.data().size(); ++i) {
    const double want = (raw.data()[i] - min) / range;
    EXPECT_LE(std::abs(s.data()[i] - want), 1e-4 * std::max(want, 1e-3)) << i;
  }
}

TEST(SaliencyTest, ZeroGradientGivesZeroMap) {
  Model model = logistic_model({1, 3, 3}, 23);
  auto& d = std::get<Dense>(model.mutable_layers()[1]);
  std::fill(d.weight.begin(), d.weight.end(), 0.0);
  const ImageTensor s = input_saliency(model, ImageTensor(3, 3, 1, 0.5));
  for (double v : s.data()) EXPECT_EQ(v, 0.0);
}

// ---- Serialization -------------------------------------------------------

TEST(SerializeTest, RoundTripIsExact) {
  ModelFile file{make_cnn(tiny_arch(), 24), 42, {{"train.epochs", "30"}}};
  randomize_batchnorm(file.model, 25);
  std::stringstream buf;
  save_model(file, buf);
  const std::string text = buf.str();
  const ModelFile back = load_model(buf);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.config, file.config);
  EXPECT_EQ(back.model.layers().size(), file.model.layers().size());
  const Tensor x = random_input(2, file.model.input_shape(), 26);
  EXPECT_EQ(back.model.predict(x), file.model.predict(x));
  std::stringstream again;
  save_model(back, again);
  EXPECT_EQ(again.str(), text);
  EXPECT_EQ(text.rfind("fairgrid-model 1\n", 0), 0u);
}

TEST(SerializeTest, RejectsCorruptFiles) {
  ModelFile file{make_cnn(tiny_arch(), 27), 1, {}};
  std::stringstream buf;
  save_model(file, buf);
  const std::string text = buf.str();

  std::istringstream wrong_version("fairgrid-model 99\n");
  EXPECT_THROW(load_model(wrong_version), std::runtime_error);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(load_model(truncated), std::runtime_error);
  std::string bad_shape = text;
  bad_shape.replace(bad_shape.find("input 2 14 14"), 13, "input 2 19 19");
  std::istringstream shape_stream(bad_shape);
  EXPECT_THROW(load_model(shape_stream), std::runtime_error);
  EXPECT_THROW(load_model(std::filesystem::path("/nonexistent/model.txt")), std::runtime_error);
}

}  // namespace
}  // namespace fairgrid::nn
