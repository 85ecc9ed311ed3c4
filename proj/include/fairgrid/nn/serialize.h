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

#ifndef FAIRGRID_NN_SERIALIZE_H_
#define FAIRGRID_NN_SERIALIZE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fairgrid/nn/model.h"

namespace fairgrid::nn {

inline constexpr int kModelFormatVersion = 1;

// A model plus the seed and settings it was trained with.
struct ModelFile {
  Model model;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
};

// Line-oriented text:
//
//   fairgrid-model 1
//   input <c> <h> <w>
//   seed <n>
//   config <key> <value>           (repeated)
//   layers <count>
//   layer <kind> [key=value ...]
//   param <name> <count> v0 v1 ...  (17 significant digits)
//   end
void save_model(const ModelFile& file, std::ostream& out);
void save_model(const ModelFile& file, const std::filesystem::path& path);

// Throws std::runtime_error on a version mismatch, malformed content or
// incompatible shapes.
ModelFile load_model(std::istream& in);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace fairgrid::nn

#endif  // FAIRGRID_NN_SERIALIZE_H_
