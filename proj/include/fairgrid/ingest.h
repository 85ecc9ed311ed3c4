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

#ifndef FAIRGRID_INGEST_H_
#define FAIRGRID_INGEST_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairgrid/image.h"
#include "fairgrid/numerics/matrix.h"

namespace fairgrid::ingest {

// Label 0 = alert (eyes open), 1 = drowsy (eyes closed).
struct SampleRecord {
  std::filesystem::path image_path;  // resolved against the manifest directory
  int label = 0;
  std::optional<double> output;      // precomputed model output in [0, 1]
  std::optional<std::string> split;  // free-form group tag
};

struct Manifest {
  std::vector<SampleRecord> records;
  std::size_t duplicate_paths = 0;  // rows repeating an earlier path
  bool has_output = false;
  bool has_split = false;
};

// Comma-separated text with header `path,label[,output][,split]`. Lines
// starting with '#' and blank lines are ignored; relative paths are resolved
// against the manifest's directory. Throws std::runtime_error naming the
// line for malformed rows or out-of-range labels/outputs.
Manifest load_manifest(const std::filesystem::path& path);

// Writes `records` with paths relative to the manifest's directory. Output
// and split columns are emitted when any record carries them.
void write_manifest(const std::vector<SampleRecord>& records,
                    const std::filesystem::path& path);

// Decodes PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) or binary
// PGM/PPM at native size. Values are divided by the format maximum. Alpha is
// dropped.
ImageTensor decode_image(const std::filesystem::path& path);

// decode_image, optional luminance grayscale, then bilinear resize.
ImageTensor load_image(const std::filesystem::path& path, std::size_t target_h,
                       std::size_t target_w, bool grayscale);

// Each image to gray, resized to side x side and flattened row-major into
// one row of an N x side^2 matrix.
Matrix stack_for_pca(const std::vector<ImageTensor>& images, std::size_t side);

}  // namespace fairgrid::ingest

#endif  // FAIRGRID_INGEST_H_
