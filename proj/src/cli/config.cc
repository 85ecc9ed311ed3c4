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

#include "fairgrid/cli/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <functional>
#include <stdexcept>
#include <system_error>

#include "fmt/format.h"

namespace fairgrid::cli {

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument(fmt::format("{}: cannot parse '{}'", key, text));
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument(fmt::format("{}: '{}' is not a boolean", key, text));
}

struct Entry {
  const char* key;
  std::function<void(RunConfig&, const std::string& key, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Entry number(const char* key, T RunConfig::*field) {
  return {key,
          [field](RunConfig& c, const std::string& k, const std::string& v) {
            c.*field = parse_number<T>(k, v);
          },
          [field](const RunConfig& c) { return fmt::format("{}", c.*field); }};
}

template <typename S, typename T>
Entry nested(const char* key, S RunConfig::*outer, T S::*field) {
  return {key,
          [outer, field](RunConfig& c, const std::string& k, const std::string& v) {
            (c.*outer).*field = parse_number<T>(k, v);
          },
          [outer, field](const RunConfig& c) { return fmt::format("{}", (c.*outer).*field); }};
}

Entry flag(const char* key, bool RunConfig::*field) {
  return {key,
          [field](RunConfig& c, const std::string& k, const std::string& v) {
            c.*field = parse_bool(k, v);
          },
          [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

template <typename T>
Entry text(const char* key, T RunConfig::*field) {
  return {key,
          [field](RunConfig& c, const std::string&, const std::string& v) { c.*field = v; },
          [field](const RunConfig& c) {
            if constexpr (std::is_same_v<T, std::filesystem::path>) {
              return (c.*field).string();
            } else {
              return c.*field;
            }
          }};
}

const std::vector<Entry>& entries() {
  using synth::SynthConfig;
  using nn::TrainConfig;
  using augment::AugmentConfig;
  static const std::vector<Entry> kEntries = {
      number("run.seed", &RunConfig::seed),
      text("run.out_dir", &RunConfig::out_dir),
      text("data.manifest", &RunConfig::manifest),
      text("data.model", &RunConfig::model),
      text("data.audit_dir", &RunConfig::audit_dir),
      nested("synth.n_per_cell", &RunConfig::synth, &SynthConfig::n_per_cell),
      nested("synth.tone_a", &RunConfig::synth, &SynthConfig::tone_a),
      nested("synth.tone_b", &RunConfig::synth, &SynthConfig::tone_b),
      nested("synth.tone_jitter", &RunConfig::synth, &SynthConfig::tone_jitter),
      nested("synth.image_side", &RunConfig::synth, &SynthConfig::image_side),
      nested("synth.noise_std", &RunConfig::synth, &SynthConfig::noise_std),
      text("synth.train_subpop", &RunConfig::train_subpop),
      number("synth.test_fraction", &RunConfig::test_fraction),
      number("train.input_side", &RunConfig::input_side),
      flag("train.grayscale", &RunConfig::grayscale_input),
      nested("train.epochs", &RunConfig::train, &TrainConfig::epochs),
      nested("train.batch_size", &RunConfig::train, &TrainConfig::batch_size),
      nested("train.learning_rate", &RunConfig::train, &TrainConfig::learning_rate),
      nested("train.beta1", &RunConfig::train, &TrainConfig::beta1),
      nested("train.beta2", &RunConfig::train, &TrainConfig::beta2),
      nested("train.epsilon", &RunConfig::train, &TrainConfig::epsilon_adam),
      number("train.conv1_channels", &RunConfig::conv1_channels),
      number("train.conv2_channels", &RunConfig::conv2_channels),
      number("train.dense1", &RunConfig::dense1),
      number("train.dense2", &RunConfig::dense2),
      number("train.dropout", &RunConfig::dropout),
      flag("train.batchnorm", &RunConfig::batchnorm),
      flag("train.augment", &RunConfig::augment),
      nested("augment.rescale_lo", &RunConfig::augment_config, &AugmentConfig::rescale_lo),
      nested("augment.rescale_hi", &RunConfig::augment_config, &AugmentConfig::rescale_hi),
      nested("augment.shear_max", &RunConfig::augment_config, &AugmentConfig::shear_max),
      nested("augment.zoom_lo", &RunConfig::augment_config, &AugmentConfig::zoom_lo),
      nested("augment.zoom_hi", &RunConfig::augment_config, &AugmentConfig::zoom_hi),
      nested("augment.hflip_prob", &RunConfig::augment_config, &AugmentConfig::hflip_prob),
      number("audit.rows", &RunConfig::rows),
      number("audit.cols", &RunConfig::cols),
      number("audit.pca_side", &RunConfig::pca_side),
      text("audit.assigner", &RunConfig::assigner),
      flag("audit.hard_labels", &RunConfig::hard_labels),
      number("render.tile", &RunConfig::tile),
      number("render.alpha", &RunConfig::alpha),
      number("saliency.alpha", &RunConfig::saliency_alpha),
  };
  return kEntries;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

void require_file(const std::filesystem::path& path, const char* field) {
  require(!path.empty(), fmt::format("{} is not set", field));
  require(std::filesystem::is_regular_file(path),
          fmt::format("{}: file not found: {}", field, path.string()));
}

void require_alpha(double alpha, const char* field) {
  require(alpha >= 0.0 && alpha <= 1.0, fmt::format("{} = {} outside [0, 1]", field, alpha));
}

}  // namespace

void set_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const Entry& e : entries()) {
    if (key == e.key) {
      e.set(config, key, value);
      return;
    }
  }
  throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
}

KeyValues effective_config(const RunConfig& config) {
  KeyValues out;
  for (const Entry& e : entries()) out.emplace_back(e.key, e.get(config));
  return out;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file,
                      const KeyValues& overrides) {
  RunConfig config;
  if (file) {
    if (!std::filesystem::is_regular_file(*file)) {
      throw std::invalid_argument("config file not found: " + file->string());
    }
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(file->string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw std::invalid_argument(fmt::format("{}: {}", file->string(), e.what()));
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        throw std::invalid_argument(fmt::format(
            "{}: key '{}' must be inside a [section]", file->string(), section));
      }
      for (const auto& [key, value] : body) {
        set_value(config, section + "." + key, value.data());
      }
    }
  }
  for (const auto& [key, value] : overrides) set_value(config, key, value);
  return config;
}

nn::ArchConfig architecture(const RunConfig& config) {
  nn::ArchConfig arch;
  arch.input = {config.grayscale_input ? 1u : 3u, config.input_side, config.input_side};
  arch.conv1_channels = config.conv1_channels;
  arch.conv2_channels = config.conv2_channels;
  arch.dense1 = config.dense1;
  arch.dense2 = config.dense2;
  arch.dropout = config.dropout;
  arch.batchnorm = config.batchnorm;
  return arch;
}

void validate(const RunConfig& config, Command command) {
  require(!config.out_dir.empty(), "run.out_dir is not set");
  switch (command) {
    case Command::kSynth:
      config.synth.validate();
      require(config.test_fraction >= 0.0 && config.test_fraction < 1.0,
              fmt::format("synth.test_fraction = {} outside [0, 1)", config.test_fraction));
      require(config.train_subpop == "A" || config.train_subpop == "B",
              fmt::format("synth.train_subpop = '{}' is not A or B", config.train_subpop));
      break;
    case Command::kTrain:
      require_file(config.manifest, "data.manifest");
      config.train.validate();
      if (config.augment) config.augment_config.validate();
      require(config.dropout >= 0.0 && config.dropout < 1.0,
              fmt::format("train.dropout = {} outside [0, 1)", config.dropout));
      require(config.conv1_channels > 0 && config.conv2_channels > 0 && config.dense1 > 0 &&
                  config.dense2 > 0,
              "train layer widths must be positive");
      require(config.input_side >= 10,
              fmt::format("train.input_side = {} is below the minimum of 10", config.input_side));
      break;
    case Command::kAudit:
      require_file(config.manifest, "data.manifest");
      if (!config.model.empty()) require_file(config.model, "data.model");
      require(config.pca_side >= 1, "audit.pca_side must be positive");
      require((config.rows == 0) == (config.cols == 0),
              "audit.rows and audit.cols must be set together");
      require(config.assigner == "greedy" || config.assigner == "exact",
              fmt::format("audit.assigner = '{}' is not greedy or exact", config.assigner));
      require(config.tile >= 1, "render.tile must be positive");
      require_alpha(config.alpha, "render.alpha");
      break;
    case Command::kSaliency:
      require_file(config.model, "data.model");
      require(!config.images.empty(), "no input images given");
      for (const auto& p : config.images) require_file(p, "image");
      require_alpha(config.saliency_alpha, "saliency.alpha");
      break;
    case Command::kReport: {
      const auto dir = config.audit_dir.empty() ? config.out_dir : config.audit_dir;
      for (const char* name : {"audit.txt", "layout.csv", "predictions.csv"}) {
        require_file(dir / name, "data.audit_dir");
      }
      break;
    }
  }
}

}  // namespace fairgrid::cli
