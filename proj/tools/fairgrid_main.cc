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

// fairgrid command-line entry point.
//
//   fairgrid synth    --out-dir data --seed 7
//   fairgrid train    --manifest data/train.csv --out-dir run
//   fairgrid audit    --manifest data/test.csv --model run/model.txt --out-dir run
//   fairgrid saliency --model run/model.txt --out-dir sal img1.png img2.png
//   fairgrid report   --audit-dir run --out-dir run

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairgrid/cli/commands.h"
#include "fairgrid/cli/config.h"

namespace {

using fairgrid::cli::Command;
using fairgrid::cli::KeyValues;

struct Flags {
  std::optional<std::string> config_file;
  KeyValues overrides;
  std::vector<std::string> sets;
  std::vector<std::string> images;
};

// Adds a flag that forwards its value to `key` in the merged config.
void forward(CLI::App* app, Flags& flags, const std::string& name, const std::string& key,
             const std::string& help) {
  app->add_option_function<std::string>(
      name, [&flags, key](const std::string& v) { flags.overrides.emplace_back(key, v); }, help);
}

CLI::App* add_command(CLI::App& app, Flags& flags, const std::string& name,
                      const std::string& help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", flags.config_file, "INI config file");
  forward(sub, flags, "--seed", "run.seed", "Master seed");
  forward(sub, flags, "--out-dir", "run.out_dir", "Output directory");
  sub->add_option("--set", flags.sets, "Override any key, as section.key=value");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PCA-grid fairness audits for binary image classifiers"};
  app.require_subcommand(1);
  Flags flags;

  CLI::App* synth = add_command(app, flags, "synth", "Generate a synthetic two-tone dataset");
  forward(synth, flags, "--n-per-cell", "synth.n_per_cell", "Images per tone x class");
  forward(synth, flags, "--image-side", "synth.image_side", "Image side in pixels");
  forward(synth, flags, "--test-fraction", "synth.test_fraction", "Held-out share");

  CLI::App* train = add_command(app, flags, "train", "Train the CNN on a manifest");
  forward(train, flags, "--manifest", "data.manifest", "Training manifest");
  forward(train, flags, "--epochs", "train.epochs", "Epoch count");
  forward(train, flags, "--batch-size", "train.batch_size", "Mini-batch size");
  forward(train, flags, "--lr", "train.learning_rate", "Adam learning rate");
  forward(train, flags, "--input-side", "train.input_side", "Network input side");

  CLI::App* audit = add_command(app, flags, "audit", "Sort images on a PCA grid and overlay errors");
  forward(audit, flags, "--manifest", "data.manifest", "Audit manifest");
  forward(audit, flags, "--model", "data.model", "Model file (else manifest outputs)");
  forward(audit, flags, "--rows", "audit.rows", "Grid rows");
  forward(audit, flags, "--cols", "audit.cols", "Grid columns");
  forward(audit, flags, "--pca-side", "audit.pca_side", "Side of the PCA thumbnails");
  forward(audit, flags, "--alpha", "render.alpha", "Overlay opacity");
  forward(audit, flags, "--tile", "render.tile", "Montage tile size in pixels");

  CLI::App* saliency = add_command(app, flags, "saliency", "Render input-gradient saliency");
  forward(saliency, flags, "--model", "data.model", "Model file");
  forward(saliency, flags, "--alpha", "saliency.alpha", "Overlay opacity");
  saliency->add_option("images", flags.images, "Input images")->required();

  CLI::App* report = add_command(app, flags, "report", "Summarize an audit directory");
  forward(report, flags, "--audit-dir", "data.audit_dir", "Directory written by audit");

  CLI11_PARSE(app, argc, argv);

  const std::pair<CLI::App*, Command> commands[] = {
      {synth, Command::kSynth},     {train, Command::kTrain},   {audit, Command::kAudit},
      {saliency, Command::kSaliency}, {report, Command::kReport}};
  try {
    for (const std::string& s : flags.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value: " + s);
      flags.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    std::optional<std::filesystem::path> config_file;
    if (flags.config_file) config_file = *flags.config_file;
    fairgrid::cli::RunConfig config = fairgrid::cli::load_config(config_file, flags.overrides);
    for (const auto& image : flags.images) config.images.emplace_back(image);
    for (const auto& [sub, command] : commands) {
      if (sub->parsed()) fairgrid::cli::run(command, config);
    }
  } catch (const std::exception& e) {
    std::cerr << "fairgrid: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
