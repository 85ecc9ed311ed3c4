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

#ifndef FAIRGRID_CLI_COMMANDS_H_
#define FAIRGRID_CLI_COMMANDS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairgrid/cli/config.h"
#include "fairgrid/grid.h"
#include "fairgrid/image.h"
#include "fairgrid/nn/tensor.h"

namespace fairgrid::cli {

// Output file names under run.out_dir.
inline constexpr const char* kCoordsFile = "coords.csv";
inline constexpr const char* kLayoutFile = "layout.csv";
inline constexpr const char* kMontageFile = "montage.png";
inline constexpr const char* kReportFile = "report.txt";
inline constexpr const char* kModelFile = "model.txt";
inline constexpr const char* kHistoryFile = "history.csv";
inline constexpr const char* kPredictionsFile = "predictions.csv";
inline constexpr const char* kAuditFile = "audit.txt";

// Every command validates its whole configuration and inputs before it
// creates any output, and throws on failure.

// images/*.png plus manifest.csv (all), train.csv and test.csv.
void cmd_synth(const RunConfig& config);
// model.txt and history.csv.
void cmd_train(const RunConfig& config);
// coords.csv, layout.csv, montage.png, predictions.csv, audit.txt and
// report.txt. Outputs come from data.model when set, otherwise from the
// manifest's output column.
void cmd_audit(const RunConfig& config);
// <stem>_saliency.png (overlay) and <stem>_saliency_map.png per image.
void cmd_saliency(const RunConfig& config);
// report.txt rebuilt from the files cmd_audit left in data.audit_dir.
void cmd_report(const RunConfig& config);

void run(Command command, const RunConfig& config);

// Converts to the model's channel count and resizes to its input size.
ImageTensor prepare_for_model(const ImageTensor& image, const nn::Shape& shape);

struct ReportInputs {
  grid::GridLayout layout;  // with overlay values
  std::vector<int> labels;
  std::vector<double> outputs;
  std::vector<std::optional<std::string>> splits;
  std::string seed;
  std::string assigner;
  KeyValues config;
};

// INI text: [summary], [accuracy_by_split], one [region_<name>] section per
// region of grid::region_report, and the echoed [config].
void write_report(const ReportInputs& inputs, std::ostream& out);

}  // namespace fairgrid::cli

#endif  // FAIRGRID_CLI_COMMANDS_H_
