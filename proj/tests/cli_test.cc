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

// Runs the fairgrid binary end to end on tiny synthetic data.

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fairgrid/cli/commands.h"
#include "fairgrid/cli/config.h"
#include "fairgrid/grid.h"
#include "fairgrid/ingest.h"
#include "fairgrid/nn/serialize.h"
#include "fairgrid/nn/train.h"
#include "fairgrid/pca.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairgrid::cli {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
  int status = -1;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args, const TempDir& scratch) {
  std::string cmd = FAIRGRID_CLI_PATH;
  for (const auto& a : args) cmd += " '" + a + "'";
  const fs::path err = scratch / "stderr.txt";
  cmd += " > /dev/null 2> '" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = testing::read_file(err);
  return r;
}

std::size_t count_lines(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

// Everything before the echoed [config] section.
std::string without_config(const std::string& report) {
  return report.substr(0, report.find("[config]"));
}

class CliTest : public ::testing::Test {
 protected:
  // 3 images per tone x class at 16 px: 12 images in data/.
  void synth(const fs::path& dir, const std::string& seed = "5") {
    const Result r = run_cli({"synth", "--out-dir", dir.string(), "--seed", seed, "--n-per-cell",
                              "3", "--image-side", "16"},
                             tmp_);
    ASSERT_EQ(r.status, 0) << r.err;
  }

  void train(const fs::path& manifest, const fs::path& out, const std::string& lr = "1e-3") {
    const Result r = run_cli({"train", "--manifest", manifest.string(), "--out-dir", out.string(),
                              "--seed", "3", "--epochs", "1", "--batch-size", "4", "--lr", lr,
                              "--input-side", "16"},
                             tmp_);
    ASSERT_EQ(r.status, 0) << r.err;
  }

  TempDir tmp_;
};

TEST_F(CliTest, SynthWritesDeterministicManifests) {
  synth(tmp_ / "a");
  synth(tmp_ / "b");
  EXPECT_EQ(count_lines(tmp_ / "a/manifest.csv"), 1 + 4 * 3u);
  EXPECT_EQ(count_lines(tmp_ / "a/train.csv") + count_lines(tmp_ / "a/test.csv"), 2 + 4 * 3u);
  for (const char* f : {"manifest.csv", "train.csv", "test.csv", "images/img_00007.png"}) {
    EXPECT_EQ(testing::read_file(tmp_ / "a" / f), testing::read_file(tmp_ / "b" / f)) << f;
  }
  synth(tmp_ / "c", "6");
  EXPECT_NE(testing::read_file(tmp_ / "a/images/img_00007.png"),
            testing::read_file(tmp_ / "c/images/img_00007.png"));
  const ingest::Manifest m = ingest::load_manifest(tmp_ / "a/manifest.csv");
  EXPECT_EQ(m.records.size(), 12u);
  EXPECT_EQ(ingest::decode_image(m.records[0].image_path).height(), 16u);
}

TEST_F(CliTest, InvalidValuesNameTheField) {
  Result r = run_cli({"synth", "--out-dir", (tmp_ / "x").string(), "--set", "synth.tone_a=1.5"},
                     tmp_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("synth.tone_a"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(tmp_ / "x"));

  r = run_cli({"synth", "--set", "synth.bogus=1"}, tmp_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("unknown config key 'synth.bogus'"), std::string::npos) << r.err;

  r = run_cli({"train", "--epochs", "many"}, tmp_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("train.epochs"), std::string::npos) << r.err;
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  testing::write_file(tmp_ / "run.ini",
                      "[run]\nseed = 9\n[synth]\nn_per_cell = 2\nimage_side = 16\n");
  Result r = run_cli({"synth", "--config", (tmp_ / "run.ini").string(), "--out-dir",
                      (tmp_ / "d").string(), "--n-per-cell", "1"},
                     tmp_);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(count_lines(tmp_ / "d/manifest.csv"), 1 + 4u);

  testing::write_file(tmp_ / "bad.ini", "[synth]\nflavor = mint\n");
  r = run_cli({"synth", "--config", (tmp_ / "bad.ini").string()}, tmp_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("synth.flavor"), std::string::npos) << r.err;
}

TEST_F(CliTest, TrainWithZeroLearningRateKeepsInitialWeights) {
  synth(tmp_ / "data");
  train(tmp_ / "data/manifest.csv", tmp_ / "run", "0");
  const nn::ModelFile file = nn::load_model(tmp_ / "run/model.txt");
  const RunConfig cfg = load_config(std::nullopt, {{"train.input_side", "16"}});
  const nn::Model init = nn::make_cnn(architecture(cfg), 3);
  EXPECT_EQ(file.seed, 3u);
  const auto got = file.model.parameters();
  const auto want = init.parameters();
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_TRUE(std::equal(got[i].begin(), got[i].end(), want[i].begin(), want[i].end())) << i;
  }
  EXPECT_EQ(count_lines(tmp_ / "run/history.csv"), 2u);
}

TEST_F(CliTest, TrainReportsMissingManifest) {
  const Result r = run_cli({"train", "--manifest", (tmp_ / "nope.csv").string()}, tmp_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("nope.csv"), std::string::npos) << r.err;
}

TEST_F(CliTest, AuditFromManifestOutputsMatchesInProcessPipeline) {
  synth(tmp_ / "data");
  ingest::Manifest m = ingest::load_manifest(tmp_ / "data/manifest.csv");
  std::vector<double> outputs;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    outputs.push_back((i * 7 % 11) / 10.0);
    m.records[i].output = outputs.back();
  }
  ingest::write_manifest(m.records, tmp_ / "scored.csv");
  const KeyValues flags = {{"data.manifest", (tmp_ / "scored.csv").string()},
                           {"run.out_dir", (tmp_ / "audit").string()},
                           {"audit.pca_side", "8"}};
  Result r = run_cli({"audit", "--manifest", flags[0].second, "--out-dir", flags[1].second,
                      "--pca-side", "8", "--tile", "4"},
                     tmp_);
  ASSERT_EQ(r.status, 0) << r.err;

  std::vector<ImageTensor> images;
  std::vector<int> labels;
  std::vector<std::optional<std::string>> splits;
  for (const auto& rec : m.records) {
    images.push_back(ingest::decode_image(rec.image_path));
    labels.push_back(rec.label);
    splits.push_back(rec.split);
  }
  const pca::PcaModel pca = pca::fit_project(ingest::stack_for_pca(images, 8), 2);
  const grid::GridLayout layout =
      grid::overlay_values(grid::greedy_assign(pca.coords, 3, 3), labels, outputs);
  ReportInputs in{layout, labels, outputs, splits, "0", "greedy", {}};
  std::ostringstream want;
  write_report(in, want);
  EXPECT_EQ(without_config(testing::read_file(tmp_ / "audit/report.txt")),
            without_config(want.str()));

  const grid::GridLayout read =
      grid::read_layout_csv(tmp_ / "audit/layout.csv", layout.spec);
  EXPECT_EQ(read.assignment, layout.assignment);
  const ImageTensor montage = ingest::decode_image(tmp_ / "audit/montage.png");
  EXPECT_EQ(montage.height(), 12u);
  EXPECT_EQ(montage.width(), 12u);
  EXPECT_EQ(count_lines(tmp_ / "audit/coords.csv"), 1 + 12u);

  // report rebuilds the same summary from the audit directory.
  r = run_cli({"report", "--audit-dir", (tmp_ / "audit").string(), "--out-dir",
               (tmp_ / "rep").string()},
              tmp_);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(without_config(testing::read_file(tmp_ / "rep/report.txt")),
            without_config(want.str()));
}

TEST_F(CliTest, PerfectPredictionsReportZeroError) {
  synth(tmp_ / "data");
  ingest::Manifest m = ingest::load_manifest(tmp_ / "data/manifest.csv");
  for (auto& rec : m.records) rec.output = rec.label;
  ingest::write_manifest(m.records, tmp_ / "perfect.csv");
  const Result r = run_cli({"audit", "--manifest", (tmp_ / "perfect.csv").string(), "--out-dir",
                            (tmp_ / "audit").string(), "--pca-side", "8"},
                           tmp_);
  ASSERT_EQ(r.status, 0) << r.err;
  const std::string report = testing::read_file(tmp_ / "audit/report.txt");
  EXPECT_NE(report.find("overall_accuracy = 1\n"), std::string::npos) << report;
  EXPECT_NE(report.find("A = 1\nB = 1\n"), std::string::npos) << report;
  for (const char* region : {"overall", "top", "bottom", "left", "right", "top_left", "top_right",
                             "bottom_left", "bottom_right"}) {
    const auto at = report.find(std::string("[region_") + region + "]");
    ASSERT_NE(at, std::string::npos) << region;
    const auto err = report.find("mean_error = ", at);
    EXPECT_EQ(report.substr(err, 15), "mean_error = 0\n") << region;
  }
  EXPECT_NE(report.find("[region_overall]\ncount = 9\n"), std::string::npos);
}

TEST_F(CliTest, AuditRejectsOversizedGridAndMissingOutputs) {
  synth(tmp_ / "data");
  ingest::Manifest m = ingest::load_manifest(tmp_ / "data/manifest.csv");
  for (auto& rec : m.records) rec.output = 0.5;
  ingest::write_manifest(m.records, tmp_ / "scored.csv");
  Result r = run_cli({"audit", "--manifest", (tmp_ / "scored.csv").string(), "--rows", "4",
                      "--cols", "4", "--out-dir", (tmp_ / "audit").string()},
                     tmp_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("16 cells"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("12 available"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(tmp_ / "audit"));

  m.records[4].output.reset();
  ingest::write_manifest(m.records, tmp_ / "partial.csv");
  r = run_cli({"audit", "--manifest", (tmp_ / "partial.csv").string(), "--out-dir",
               (tmp_ / "audit").string()},
              tmp_);
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("record 5"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(tmp_ / "audit"));
}

TEST_F(CliTest, AuditWithModelUsesModelPredictions) {
  synth(tmp_ / "data");
  train(tmp_ / "data/train.csv", tmp_ / "run");
  const Result r = run_cli({"audit", "--manifest", (tmp_ / "data/manifest.csv").string(),
                            "--model", (tmp_ / "run/model.txt").string(), "--out-dir",
                            (tmp_ / "audit").string(), "--pca-side", "8"},
                           tmp_);
  ASSERT_EQ(r.status, 0) << r.err;
  const nn::ModelFile file = nn::load_model(tmp_ / "run/model.txt");
  const ingest::Manifest m = ingest::load_manifest(tmp_ / "data/manifest.csv");
  std::vector<ImageTensor> inputs;
  for (const auto& rec : m.records) {
    inputs.push_back(
        prepare_for_model(ingest::decode_image(rec.image_path), file.model.input_shape()));
  }
  const std::vector<double> want = nn::predict_all(file.model, inputs);

  std::ifstream in(tmp_ / "audit/predictions.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "index,path,label,output,split");
  std::size_t i = 0;
  for (; std::getline(in, line); ++i) {
    const auto end = line.rfind(',');
    const auto begin = line.rfind(',', end - 1);
    ASSERT_LT(i, want.size());
    EXPECT_EQ(std::stod(line.substr(begin + 1, end - begin - 1)), want[i]) << line;
  }
  EXPECT_EQ(i, want.size());
}

TEST_F(CliTest, SaliencyWritesTwoImagesPerInput) {
  synth(tmp_ / "data");
  train(tmp_ / "data/train.csv", tmp_ / "run");
  const Result r = run_cli({"saliency", "--model", (tmp_ / "run/model.txt").string(), "--out-dir",
                            (tmp_ / "sal").string(), (tmp_ / "data/images/img_00000.png").string(),
                            (tmp_ / "data/images/img_00009.png").string()},
                           tmp_);
  ASSERT_EQ(r.status, 0) << r.err;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(tmp_ / "sal")) {
    ++files;
    EXPECT_EQ(ingest::decode_image(e.path()).height(), 16u) << e.path();
  }
  EXPECT_EQ(files, 4u);
  EXPECT_TRUE(fs::exists(tmp_ / "sal/img_00009_saliency_map.png"));

  const Result missing = run_cli({"saliency", "--model", (tmp_ / "none.txt").string(),
                                  (tmp_ / "data/images/img_00000.png").string()},
                                 tmp_);
  EXPECT_NE(missing.status, 0);
  EXPECT_NE(missing.err.find("none.txt"), std::string::npos) << missing.err;
}

}  // namespace
}  // namespace fairgrid::cli
