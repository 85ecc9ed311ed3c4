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

#ifndef FAIRGRID_RENDER_H_
#define FAIRGRID_RENDER_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "fairgrid/grid.h"
#include "fairgrid/image.h"

namespace fairgrid::render {

using Rgb = std::array<std::uint8_t, 3>;

struct Anchor {
  double position;
  Rgb color;
};

// Piecewise-linear palette. Positions strictly increase from 0 to 1.
class Colormap {
 public:
  // Throws std::invalid_argument when the anchors break the invariants.
  explicit Colormap(std::vector<Anchor> anchors);

  // Purple (low) -> green -> yellow (high).
  static Colormap overlay();
  // Blue (low) -> green -> red (high).
  static Colormap saliency();

  // v is clamped to [0, 1]; channels are rounded to nearest.
  Rgb lookup(double v) const;
  const std::vector<Anchor>& anchors() const { return anchors_; }

 private:
  std::vector<Anchor> anchors_;
};

inline constexpr double kDefaultAlpha = 0.45;

// One montage cell: the image resized to tile_px square in RGB, tinted by
// the color of (1 - overlay) when an overlay is present.
ImageTensor render_tile(const ImageTensor& image, std::optional<double> overlay,
                        std::size_t tile_px, double alpha, const Colormap& map);

// (rows * tile_px) x (cols * tile_px) RGB montage; `images` is indexed by
// sample index. Empty cells are black. Throws std::out_of_range when an
// assigned sample has no image and std::invalid_argument for tile_px == 0
// or alpha outside [0, 1].
ImageTensor montage(const grid::GridLayout& layout,
                    std::span<const ImageTensor> images, std::size_t tile_px,
                    double alpha, const Colormap& map = Colormap::overlay());

// The saliency palette blended over the grayscale rendering of `image`.
// `saliency` is single-channel with the image's height and width.
ImageTensor saliency_overlay(const ImageTensor& image, const ImageTensor& saliency,
                             double alpha, const Colormap& map = Colormap::saliency());

// value * 255 rounded, after clamping to [0, 1].
std::uint8_t quantize(double value);

// Binary P6 (RGB) or P5 (gray) bytes.
std::vector<std::uint8_t> encode_ppm(const ImageTensor& image);

// 8-bit non-interlaced gray or RGB. Throws std::invalid_argument for an empty
// image and std::runtime_error when the path is not writable.
void write_png(const ImageTensor& image, const std::filesystem::path& path);
void write_ppm(const ImageTensor& image, const std::filesystem::path& path);

}  // namespace fairgrid::render

#endif  // FAIRGRID_RENDER_H_
