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

#include "fairgrid/render.h"

#include <random>

#include "fairgrid/ingest.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairgrid::render {
namespace {

using testing::TempDir;

TEST(ColormapTest, EndpointsAndMidpoints) {
  const Colormap map = Colormap::overlay();
  EXPECT_EQ(map.lookup(0.0), (Rgb{68, 1, 84}));
  EXPECT_EQ(map.lookup(1.0), (Rgb{253, 231, 37}));
  EXPECT_EQ(map.lookup(-3.0), (Rgb{68, 1, 84}));
  EXPECT_EQ(map.lookup(7.0), (Rgb{253, 231, 37}));
  const auto& anchors = map.anchors();
  for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
    const double mid = (anchors[i].position + anchors[i + 1].position) / 2;
    const Rgb got = map.lookup(mid);
    for (std::size_t c = 0; c < 3; ++c) {
      const double avg = (anchors[i].color[c] + anchors[i + 1].color[c]) / 2.0;
      EXPECT_LE(std::abs(got[c] - avg), 1.0);
    }
    EXPECT_EQ(map.lookup(anchors[i].position), anchors[i].color);
  }
}

TEST(ColormapTest, RejectsBadAnchors) {
  EXPECT_THROW(Colormap(std::vector<Anchor>{{0.0, {0, 0, 0}}}), std::invalid_argument);
  EXPECT_THROW(Colormap({{0.1, {0, 0, 0}}, {1.0, {1, 1, 1}}}), std::invalid_argument);
  EXPECT_THROW(Colormap({{0.0, {0, 0, 0}}, {0.5, {0, 0, 0}}, {0.5, {0, 0, 0}}, {1.0, {0, 0, 0}}}),
               std::invalid_argument);
}

grid::GridLayout layout_2x2(std::vector<std::optional<double>> overlay) {
  grid::GridLayout g;
  g.spec.rows = g.spec.cols = 2;
  g.assignment = {2, 0, 3, 1};
  g.overlay = std::move(overlay);
  return g;
}

std::vector<ImageTensor> faces(std::mt19937_64& rng) {
  std::vector<ImageTensor> images;
  for (int i = 0; i < 4; ++i) images.push_back(testing::random_image(9 + i, 7, i % 2 ? 3 : 1, rng));
  return images;
}

TEST(MontageTest, QuadrantsMatchIndependentlyCompositedTiles) {
  std::mt19937_64 rng(1);
  const auto images = faces(rng);
  const grid::GridLayout g = layout_2x2({0.1, 0.9, 0.5, 0.0});
  const std::size_t tile = 6;
  const double alpha = 0.45;
  const ImageTensor m = montage(g, images, tile, alpha);
  ASSERT_EQ(m.height(), 2 * tile);
  ASSERT_EQ(m.width(), 2 * tile);
  const Colormap map = Colormap::overlay();
  for (std::size_t cell = 0; cell < 4; ++cell) {
    const ImageTensor base = to_rgb(resize_bilinear(images[*g.assignment[cell]], tile, tile));
    const Rgb color = map.lookup(1.0 - *g.overlay[cell]);
    const std::size_t oy = (cell / 2) * tile, ox = (cell % 2) * tile;
    for (std::size_t y = 0; y < tile; ++y) {
      for (std::size_t x = 0; x < tile; ++x) {
        for (std::size_t c = 0; c < 3; ++c) {
          const double want = alpha * color[c] / 255.0 + (1 - alpha) * base.at(y, x, c);
          EXPECT_NEAR(m.at(oy + y, ox + x, c), want, 1e-15);
        }
      }
    }
  }
}

TEST(MontageTest, AlphaExtremes) {
  std::mt19937_64 rng(2);
  const auto images = faces(rng);
  const grid::GridLayout g = layout_2x2({0.2, 0.4, 0.6, 0.8});
  const ImageTensor plain = montage(g, images, 5, 0.0);
  const ImageTensor tint = montage(g, images, 5, 1.0);
  const Colormap map = Colormap::overlay();
  for (std::size_t cell = 0; cell < 4; ++cell) {
    const ImageTensor base = to_rgb(resize_bilinear(images[*g.assignment[cell]], 5, 5));
    const Rgb color = map.lookup(1.0 - *g.overlay[cell]);
    const std::size_t oy = (cell / 2) * 5, ox = (cell % 2) * 5;
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_EQ(plain.at(oy + 2, ox + 3, c), base.at(2, 3, c));
      EXPECT_EQ(tint.at(oy + 4, ox + 1, c), color[c] / 255.0);
    }
  }
}

TEST(MontageTest, EmptyCellsAreBlackAndMissingImagesRejected) {
  std::mt19937_64 rng(3);
  const auto images = faces(rng);
  grid::GridLayout g = layout_2x2({0.2, 0.4, 0.6, 0.8});
  g.assignment[3].reset();
  g.overlay[3].reset();
  const ImageTensor m = montage(g, images, 4, 0.5);
  for (std::size_t y = 4; y < 8; ++y)
    for (std::size_t x = 4; x < 8; ++x)
      for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(m.at(y, x, c), 0.0);
  g.assignment[3] = 9;
  EXPECT_THROW(montage(g, images, 4, 0.5), std::out_of_range);
  EXPECT_THROW(montage(layout_2x2({0, 0, 0, 0}), images, 0, 0.5), std::invalid_argument);
  EXPECT_THROW(montage(layout_2x2({0, 0, 0, 0}), images, 4, 1.5), std::invalid_argument);
}

TEST(MontageTest, BlendStaysInUnitRange) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  const auto images = faces(rng);
  for (int trial = 0; trial < 20; ++trial) {
    const ImageTensor m = montage(layout_2x2({u(rng), u(rng), u(rng), u(rng)}), images, 3, u(rng));
    for (double v : m.data()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(SaliencyOverlayTest, ZeroSaliencyIsUniformBlueTint) {
  std::mt19937_64 rng(5);
  const ImageTensor img = testing::random_image(4, 5, 3, rng);
  const ImageTensor out = saliency_overlay(img, ImageTensor(4, 5, 1, 0.0), 0.3);
  const ImageTensor gray = to_grayscale(img);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 5; ++x) {
      EXPECT_NEAR(out.at(y, x, 0), 0.7 * gray.at(y, x), 1e-15);
      EXPECT_NEAR(out.at(y, x, 1), 0.7 * gray.at(y, x), 1e-15);
      EXPECT_NEAR(out.at(y, x, 2), 0.3 + 0.7 * gray.at(y, x), 1e-15);
    }
  }
}

TEST(SaliencyOverlayTest, PeakIsRedAndHalfBlendIsAverage) {
  const ImageTensor img(3, 3, 1, 0.4);
  ImageTensor sal(3, 3, 1, 0.0);
  sal.at(1, 2) = 1.0;
  sal.at(0, 0) = 0.5;
  const ImageTensor out = saliency_overlay(img, sal, 0.5);
  EXPECT_GT(out.at(1, 2, 0), out.at(1, 2, 1));
  EXPECT_GT(out.at(1, 2, 0), out.at(1, 2, 2));
  EXPECT_NEAR(out.at(1, 2, 0), (1.0 + 0.4) / 2, 1e-15);
  EXPECT_NEAR(out.at(0, 0, 1), (1.0 + 0.4) / 2, 1e-15);
  EXPECT_NEAR(out.at(0, 0, 0), 0.2, 1e-15);
  EXPECT_THROW(saliency_overlay(img, ImageTensor(3, 4, 1), 0.5), std::invalid_argument);
}

TEST(WriterTest, PpmBytesForWhitePixel) {
  const std::vector<std::uint8_t> bytes = encode_ppm(ImageTensor(1, 1, 3, 1.0));
  const std::string header = "P6\n1 1\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 3);
  EXPECT_TRUE(std::equal(header.begin(), header.end(), bytes.begin()));
  EXPECT_EQ(bytes[header.size()], 255);
  EXPECT_EQ(bytes[header.size() + 1], 255);
  EXPECT_EQ(bytes[header.size() + 2], 255);
  const auto gray = encode_ppm(ImageTensor(2, 3, 1, 0.5));
  EXPECT_EQ(std::string(gray.begin(), gray.begin() + 11), "P5\n3 2\n255\n");
  EXPECT_EQ(gray.back(), 128);
}

TEST(WriterTest, RejectsEmptyImagesAndBadPaths) {
  TempDir dir;
  EXPECT_THROW(write_ppm(ImageTensor(), dir / "a.ppm"), std::invalid_argument);
  EXPECT_THROW(write_png(ImageTensor(0, 4, 3), dir / "a.png"), std::invalid_argument);
  EXPECT_THROW(write_png(ImageTensor(2, 2, 3), dir / "no/such/dir/a.png"), std::runtime_error);
  EXPECT_THROW(write_ppm(ImageTensor(2, 2, 3), dir / "no/such/dir/a.ppm"), std::runtime_error);
}

TEST(WriterTest, DeterministicAndRoundTripWithinQuantization) {
  TempDir dir;
  std::mt19937_64 rng(6);
  const ImageTensor img = testing::random_image(11, 13, 3, rng);
  write_ppm(img, dir / "a.ppm");
  write_ppm(img, dir / "b.ppm");
  EXPECT_EQ(testing::read_file(dir / "a.ppm"), testing::read_file(dir / "b.ppm"));
  write_png(img, dir / "a.png");
  write_png(img, dir / "b.png");
  EXPECT_EQ(ingest::decode_image(dir / "a.png"), ingest::decode_image(dir / "b.png"));
  const ImageTensor back = ingest::decode_image(dir / "a.png");
  for (std::size_t i = 0; i < img.data().size(); ++i) {
    EXPECT_LE(std::abs(back.data()[i] - img.data()[i]), 0.5 / 255 + 1e-12);
  }
}

}  // namespace
}  // namespace fairgrid::render
