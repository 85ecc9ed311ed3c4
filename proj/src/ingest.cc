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

#include "fairgrid/ingest.h"

#include <png.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fmt/format.h"
#include "fmt/ostream.h"

namespace fairgrid::ingest {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ImageTensor decode_png(const std::vector<unsigned char>& bytes,
                       const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), image.message));
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw std::runtime_error(fmt::format("{}: {}", path.string(), msg));
  }
  const std::size_t channels = color ? 3 : 1;
  ImageTensor out(image.height, image.width, channels);
  for (std::size_t i = 0; i < pixels.size(); ++i) out.data()[i] = pixels[i] / 255.0;
  return out;
}

// Binary P5 (gray) / P6 (RGB) with '#' comments in the header.
ImageTensor decode_pnm(const std::vector<unsigned char>& bytes,
                       const std::filesystem::path& path) {
  const std::size_t channels = bytes[1] == '6' ? 3 : 1;
  std::size_t pos = 2;
  auto truncated = [&]() {
    return std::runtime_error(fmt::format("{}: truncated PNM file", path.string()));
  };
  auto next_number = [&]() {
    for (;;) {
      if (pos >= bytes.size()) throw truncated();
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    if (!std::isdigit(bytes[pos])) {
      throw std::runtime_error(fmt::format("{}: malformed PNM header", path.string()));
    }
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) v = v * 10 + (bytes[pos++] - '0');
    return v;
  };
  const std::size_t width = next_number();
  const std::size_t height = next_number();
  const std::size_t maxval = next_number();
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw std::runtime_error(fmt::format("{}: invalid PNM header", path.string()));
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw truncated();
  ++pos;
  const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
  const std::size_t count = width * height * channels;
  if (bytes.size() - pos < count * sample_bytes) throw truncated();
  ImageTensor out(height, width, channels);
  const double scale = static_cast<double>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t v = bytes[pos + i * sample_bytes];
    if (sample_bytes == 2) v = (v << 8) | bytes[pos + i * 2 + 1];
    out.data()[i] = std::min(static_cast<double>(v) / scale, 1.0);
  }
  return out;
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  Manifest manifest;
  std::set<std::filesystem::path> seen;
  int output_col = -1, split_col = -1;
  std::size_t columns = 0;
  bool have_header = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(fmt::format("{}:{}: {}", path.string(), line_no, what));
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::vector<std::string> fields = split_csv(stripped);
    for (auto& f : fields) f = trim(f);
    if (!have_header) {
      if (fields.size() < 2 || fields[0] != "path" || fields[1] != "label") {
        fail("header must start with 'path,label'");
      }
      for (std::size_t i = 2; i < fields.size(); ++i) {
        if (fields[i] == "output" && output_col < 0 && split_col < 0) {
          output_col = static_cast<int>(i);
        } else if (fields[i] == "split" && split_col < 0) {
          split_col = static_cast<int>(i);
        } else {
          fail(fmt::format("unexpected column '{}'", fields[i]));
        }
      }
      columns = fields.size();
      manifest.has_output = output_col >= 0;
      manifest.has_split = split_col >= 0;
      have_header = true;
      continue;
    }
    if (fields.size() != columns) {
      fail(fmt::format("expected {} fields, got {}", columns, fields.size()));
    }
    SampleRecord rec;
    if (fields[0].empty()) fail("empty path");
    const std::filesystem::path p(fields[0]);
    rec.image_path = p.is_absolute() ? p : base / p;
    if (fields[1] == "0") {
      rec.label = 0;
    } else if (fields[1] == "1") {
      rec.label = 1;
    } else {
      fail(fmt::format("label '{}' is not 0 or 1", fields[1]));
    }
    if (output_col >= 0 && !fields[output_col].empty()) {
      const std::string& s = fields[output_col];
      double v = 0.0;
      try {
        std::size_t pos = 0;
        v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
      } catch (const std::logic_error&) {
        fail(fmt::format("output '{}' is not a number", s));
      }
      if (!(v >= 0.0 && v <= 1.0)) fail(fmt::format("output {} outside [0, 1]", s));
      rec.output = v;
    }
    if (split_col >= 0 && !fields[split_col].empty()) rec.split = fields[split_col];
    if (!seen.insert(rec.image_path.lexically_normal()).second) ++manifest.duplicate_paths;
    manifest.records.push_back(std::move(rec));
  }
  if (!have_header) {
    throw std::runtime_error(fmt::format("{}: manifest has no header", path.string()));
  }
  return manifest;
}

void write_manifest(const std::vector<SampleRecord>& records,
                    const std::filesystem::path& path) {
  const bool any_output = std::any_of(records.begin(), records.end(),
                                      [](const SampleRecord& r) { return r.output.has_value(); });
  const bool any_split = std::any_of(records.begin(), records.end(),
                                     [](const SampleRecord& r) { return r.split.has_value(); });
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << "path,label";
  if (any_output) out << ",output";
  if (any_split) out << ",split";
  out << '\n';
  const std::filesystem::path base = path.parent_path();
  for (const SampleRecord& r : records) {
    const std::filesystem::path rel =
        base.empty() ? r.image_path : r.image_path.lexically_relative(base);
    fmt::print(out, "{},{}", rel.generic_string(), r.label);
    if (any_output) {
      out << ',';
      if (r.output) fmt::print(out, "{:.17g}", *r.output);
    }
    if (any_split) out << ',' << r.split.value_or("");
    out << '\n';
  }
}

ImageTensor decode_image(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = read_bytes(path);
  static constexpr unsigned char kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngMagic, kPngMagic + 8, bytes.begin())) {
    return decode_png(bytes, path);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes, path);
  }
  throw std::runtime_error(fmt::format("{}: unsupported image format", path.string()));
}

ImageTensor load_image(const std::filesystem::path& path, std::size_t target_h,
                       std::size_t target_w, bool grayscale) {
  if (target_h == 0 || target_w == 0) {
    throw std::invalid_argument(
        fmt::format("target size {}x{} has a zero dimension", target_h, target_w));
  }
  ImageTensor image = decode_image(path);
  if (grayscale) image = to_grayscale(image);
  return resize_bilinear(image, target_h, target_w);
}

Matrix stack_for_pca(const std::vector<ImageTensor>& images, std::size_t side) {
  if (images.empty()) throw std::invalid_argument("stack_for_pca: no images");
  if (side == 0) throw std::invalid_argument("stack_for_pca: side must be positive");
  Matrix out(images.size(), side * side);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const ImageTensor small = resize_bilinear(to_grayscale(images[i]), side, side);
    std::copy(small.data().begin(), small.data().end(), out.row(i).begin());
  }
  return out;
}

}  // namespace fairgrid::ingest
