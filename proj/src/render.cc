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

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "fmt/format.h"

namespace fairgrid::render {

namespace {

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument(fmt::format("alpha = {} outside [0, 1]", alpha));
  }
}

void require_writable(const ImageTensor& image) {
  if (image.empty() || image.height() == 0 || image.width() == 0) {
    throw std::invalid_argument("cannot write an image with a zero dimension");
  }
  if (image.channels() != 1 && image.channels() != 3) {
    throw std::invalid_argument(
        fmt::format("cannot write an image with {} channels", image.channels()));
  }
}

// alpha * color + (1 - alpha) * pixel, per channel, in place.
void blend(ImageTensor& rgb, std::size_t y, std::size_t x, const Rgb& color, double alpha) {
  for (std::size_t c = 0; c < 3; ++c) {
    const double tint = color[c] / 255.0;
    rgb.at(y, x, c) = alpha * tint + (1.0 - alpha) * rgb.at(y, x, c);
  }
}

}  // namespace

Colormap::Colormap(std::vector<Anchor> anchors) : anchors_(std::move(anchors)) {
  if (anchors_.size() < 2) throw std::invalid_argument("colormap needs two anchors");
  if (anchors_.front().position != 0.0 || anchors_.back().position != 1.0) {
    throw std::invalid_argument("colormap anchors must span [0, 1]");
  }
  for (std::size_t i = 1; i < anchors_.size(); ++i) {
    if (!(anchors_[i].position > anchors_[i - 1].position)) {
      throw std::invalid_argument("colormap positions must strictly increase");
    }
  }
}

Colormap Colormap::overlay() {
  return Colormap({{0.0, {68, 1, 84}},
                   {0.25, {59, 82, 139}},
                   {0.5, {33, 145, 140}},
                   {0.75, {94, 201, 98}},
                   {1.0, {253, 231, 37}}});
}

Colormap Colormap::saliency() {
  return Colormap({{0.0, {0, 0, 255}}, {0.5, {0, 255, 0}}, {1.0, {255, 0, 0}}});
}

Rgb Colormap::lookup(double v) const {
  if (!(v > 0.0)) return anchors_.front().color;  // also catches NaN
  if (v >= 1.0) return anchors_.back().color;
  std::size_t hi = 1;
  while (anchors_[hi].position < v) ++hi;
  const Anchor& a = anchors_[hi - 1];
  const Anchor& b = anchors_[hi];
  const double t = (v - a.position) / (b.position - a.position);
  Rgb out;
  for (std::size_t c = 0; c < 3; ++c) {
    const double value = a.color[c] + t * (static_cast<double>(b.color[c]) - a.color[c]);
    out[c] = static_cast<std::uint8_t>(std::lround(value));
  }
  return out;
}

ImageTensor render_tile(const ImageTensor& image, std::optional<double> overlay,
                        std::size_t tile_px, double alpha, const Colormap& map) {
  if (tile_px == 0) throw std::invalid_argument("tile size must be positive");
  require_alpha(alpha);
  ImageTensor tile = to_rgb(resize_bilinear(image, tile_px, tile_px));
  if (overlay) {
    const Rgb color = map.lookup(1.0 - *overlay);
    for (std::size_t y = 0; y < tile_px; ++y) {
      for (std::size_t x = 0; x < tile_px; ++x) blend(tile, y, x, color, alpha);
    }
  }
  return tile;
}

ImageTensor montage(const grid::GridLayout& layout,
                    std::span<const ImageTensor> images, std::size_t tile_px,
                    double alpha, const Colormap& map) {
  if (tile_px == 0) throw std::invalid_argument("tile size must be positive");
  require_alpha(alpha);
  const grid::GridSpec& spec = layout.spec;
  for (const auto& sample : layout.assignment) {
    if (sample && *sample >= images.size()) {
      throw std::out_of_range(fmt::format(
          "cell refers to sample {} but only {} images were given", *sample, images.size()));
    }
  }
  ImageTensor out(spec.rows * tile_px, spec.cols * tile_px, 3, 0.0);
  const auto cells = static_cast<std::ptrdiff_t>(spec.cells());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t cell = 0; cell < cells; ++cell) {
    const auto& sample = layout.assignment[cell];
    if (!sample) continue;
    const ImageTensor tile =
        render_tile(images[*sample], layout.overlay[cell], tile_px, alpha, map);
    const std::size_t oy = (cell / spec.cols) * tile_px;
    const std::size_t ox = (cell % spec.cols) * tile_px;
    for (std::size_t y = 0; y < tile_px; ++y) {
      std::copy_n(tile.data().begin() + y * tile_px * 3, tile_px * 3, &out.at(oy + y, ox, 0));
    }
  }
  return out;
}

ImageTensor saliency_overlay(const ImageTensor& image, const ImageTensor& saliency,
                             double alpha, const Colormap& map) {
  require_alpha(alpha);
  if (saliency.height() != image.height() || saliency.width() != image.width() ||
      saliency.channels() != 1) {
    throw std::invalid_argument(fmt::format(
        "saliency map {}x{}x{} does not match image {}x{}", saliency.height(),
        saliency.width(), saliency.channels(), image.height(), image.width()));
  }
  ImageTensor out = to_rgb(to_grayscale(image));
  for (std::size_t y = 0; y < out.height(); ++y) {
    for (std::size_t x = 0; x < out.width(); ++x) {
      blend(out, y, x, map.lookup(saliency.at(y, x)), alpha);
    }
  }
  return out;
}

std::uint8_t quantize(double value) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(value, 0.0, 1.0) * 255.0));
}

std::vector<std::uint8_t> encode_ppm(const ImageTensor& image) {
  require_writable(image);
  const std::string header = fmt::format("{}\n{} {}\n255\n", image.channels() == 3 ? "P6" : "P5",
                                         image.width(), image.height());
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + image.data().size());
  for (double v : image.data()) bytes.push_back(quantize(v));
  return bytes;
}

void write_ppm(const ImageTensor& image, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_ppm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_png(const ImageTensor& image, const std::filesystem::path& path) {
  require_writable(image);
  std::vector<png_byte> pixels(image.data().size());
  std::transform(image.data().begin(), image.data().end(), pixels.begin(), quantize);
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw std::runtime_error(fmt::format("cannot write {}: {}", path.string(), msg));
  }
}

}  // namespace fairgrid::render
