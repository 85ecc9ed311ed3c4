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

#include "fairgrid/cli/commands.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fairgrid/augment.h"
#include "fairgrid/ingest.h"
#include "fairgrid/nn/serialize.h"
#include "fairgrid/nn/train.h"
#include "fairgrid/pca.h"
#include "fairgrid/render.h"
#include "fairgrid/synth.h"
#include "fmt/format.h"
#include "fmt/ostream.h"

namespace fairgrid::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<ImageTensor> decode_all(const std::vector<ingest::SampleRecord>& records) {
  std::vector<ImageTensor> images;
  images.reserve(records.size());
  for (const auto& r : records) images.push_back(ingest::decode_image(r.image_path));
  return images;
}

std::vector<ImageTensor> prepare_all(const std::vector<ImageTensor>& images,
                                     const nn::Shape& shape) {
  std::vector<ImageTensor> out;
  out.reserve(images.size());
  for (const auto& image : images) out.push_back(prepare_for_model(image, shape));
  return out;
}

bool correct(int label, double output) { return (output >= 0.5 ? 1 : 0) == label; }

void write_region(std::ostream& out, const char* name, const grid::RegionStats& s) {
  fmt::print(out, "\n[region_{}]\ncount = {}\nmean_error = {:.17g}\n", name, s.count,
             s.mean_error);
}

void write_grid_file(const grid::GridSpec& spec, const std::string& assigner,
                     const RunConfig& config, const fs::path& path) {
  std::ofstream out = open_output(path);
  fmt::print(out, "[grid]\nrows = {}\ncols = {}\n", spec.rows, spec.cols);
  fmt::print(out, "x_min = {:.17g}\nx_max = {:.17g}\ny_min = {:.17g}\ny_max = {:.17g}\n",
             spec.x_min, spec.x_max, spec.y_min, spec.y_max);
  fmt::print(out, "d1 = {:.17g}\nd2 = {:.17g}\nassigner = {}\n", spec.d1, spec.d2, assigner);
  out << "\n[config]\n";
  for (const auto& [k, v] : effective_config(config)) fmt::print(out, "{} = {}\n", k, v);
}

}  // namespace

ImageTensor prepare_for_model(const ImageTensor& image, const nn::Shape& shape) {
  const ImageTensor converted = shape.c == 1 ? to_grayscale(image) : to_rgb(image);
  return resize_bilinear(converted, shape.h, shape.w);
}

void write_report(const ReportInputs& in, std::ostream& out) {
  const std::size_t n = in.labels.size();
  if (in.outputs.size() != n || in.splits.size() != n) {
    throw std::invalid_argument("report inputs have inconsistent lengths");
  }
  std::size_t hits = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_split;  // hits, total
  for (std::size_t i = 0; i < n; ++i) {
    const bool ok = correct(in.labels[i], in.outputs[i]);
    hits += ok;
    if (in.splits[i]) {
      auto& [h, t] = by_split[*in.splits[i]];
      h += ok;
      ++t;
    }
  }
  const grid::RegionReport regions = grid::region_report(in.layout);
  out << "[summary]\n";
  fmt::print(out, "samples = {}\n", n);
  fmt::print(out, "overall_accuracy = {:.17g}\n", n ? static_cast<double>(hits) / n : 0.0);
  fmt::print(out, "grid_rows = {}\ngrid_cols = {}\n", in.layout.spec.rows, in.layout.spec.cols);
  fmt::print(out, "assigner = {}\nseed = {}\n", in.assigner, in.seed);
  out << "\n[accuracy_by_split]\n";
  for (const auto& [name, counts] : by_split) {
    fmt::print(out, "{} = {:.17g}\n", name,
               static_cast<double>(counts.first) / static_cast<double>(counts.second));
  }
  write_region(out, "overall", regions.overall);
  write_region(out, "top", regions.top);
  write_region(out, "bottom", regions.bottom);
  write_region(out, "left", regions.left);
  write_region(out, "right", regions.right);
  write_region(out, "top_left", regions.top_left);
  write_region(out, "top_right", regions.top_right);
  write_region(out, "bottom_left", regions.bottom_left);
  write_region(out, "bottom_right", regions.bottom_right);
  out << "\n[config]\n";
  for (const auto& [k, v] : in.config) fmt::print(out, "{} = {}\n", k, v);
}

void cmd_synth(const RunConfig& config) {
  validate(config, Command::kSynth);
  synth::SynthConfig sc = config.synth;
  sc.rng_seed = config.seed;
  synth::Dataset data = synth::generate(sc);
  const synth::Split split =
      synth::split_biased(data.records, config.train_subpop, config.test_fraction, config.seed);

  fs::create_directories(config.out_dir / "images");
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    auto& rec = data.records[i];
    rec.image_path = config.out_dir / rec.image_path;
    render::write_png(data.images[i], rec.image_path);
  }
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<ingest::SampleRecord> out;
    for (std::size_t i : idx) out.push_back(data.records[i]);
    return out;
  };
  ingest::write_manifest(data.records, config.out_dir / "manifest.csv");
  ingest::write_manifest(pick(split.train), config.out_dir / "train.csv");
  ingest::write_manifest(pick(split.test), config.out_dir / "test.csv");
}

void cmd_train(const RunConfig& config) {
  validate(config, Command::kTrain);
  const nn::ArchConfig arch = architecture(config);
  nn::Model model = nn::make_cnn(arch, config.seed);
  const ingest::Manifest manifest = ingest::load_manifest(config.manifest);
  if (manifest.records.empty()) {
    throw std::invalid_argument("data.manifest has no records: " + config.manifest.string());
  }
  nn::LabeledImages data;
  data.images = prepare_all(decode_all(manifest.records), arch.input);
  for (const auto& r : manifest.records) data.labels.push_back(r.label);

  nn::TrainConfig tc = config.train;
  tc.rng_seed = config.seed;
  std::optional<augment::AugmentConfig> ac;
  if (config.augment) {
    ac = config.augment_config;
    ac->rng_seed = config.seed;
  }
  const nn::TrainResult result = nn::train(model, data, tc, ac);

  nn::ModelFile file{std::move(model), config.seed, {}};
  for (const auto& [k, v] : effective_config(config)) {
    if (k.starts_with("train.") || k.starts_with("augment.")) file.config.emplace_back(k, v);
  }
  fs::create_directories(config.out_dir);
  nn::save_model(file, config.out_dir / kModelFile);
  std::ofstream history = open_output(config.out_dir / kHistoryFile);
  history << "epoch,loss,accuracy\n";
  for (std::size_t e = 0; e < result.history.size(); ++e) {
    fmt::print(history, "{},{:.17g},{:.17g}\n", e + 1, result.history[e].loss,
               result.history[e].accuracy);
  }
}

void cmd_audit(const RunConfig& config) {
  validate(config, Command::kAudit);
  const ingest::Manifest manifest = ingest::load_manifest(config.manifest);
  const std::size_t n = manifest.records.size();
  if (n < 2) {
    throw std::invalid_argument(fmt::format("data.manifest has {} records; need at least 2", n));
  }
  std::optional<nn::ModelFile> model;
  if (!config.model.empty()) {
    model = nn::load_model(config.model);
    model->model.require_binary_head();
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!manifest.records[i].output) {
        throw std::invalid_argument(fmt::format(
            "record {} of {} has no output and data.model is not set", i + 1,
            config.manifest.string()));
      }
    }
  }
  const std::size_t rows = config.rows ? config.rows : grid::default_side(n);
  const std::size_t cols = config.cols ? config.cols : rows;
  if (rows * cols > n) {
    throw std::invalid_argument(fmt::format(
        "grid of {}x{} = {} cells exceeds the {} available images", rows, cols, rows * cols, n));
  }
  if (config.assigner == "exact" && rows * cols > grid::kMaxExactCells) {
    throw std::invalid_argument(fmt::format("audit.assigner = exact supports at most {} cells",
                                            grid::kMaxExactCells));
  }

  const std::vector<ImageTensor> images = decode_all(manifest.records);
  std::vector<int> labels;
  std::vector<double> outputs;
  std::vector<std::optional<std::string>> splits;
  for (const auto& r : manifest.records) {
    labels.push_back(r.label);
    splits.push_back(r.split);
    if (!model) outputs.push_back(*r.output);
  }
  if (model) {
    outputs = nn::predict_all(model->model, prepare_all(images, model->model.input_shape()));
  }

  const pca::PcaModel pca = pca::fit_project(ingest::stack_for_pca(images, config.pca_side), 2);
  grid::GridLayout layout = config.assigner == "exact"
                                ? grid::exact_assign(pca.coords, rows, cols)
                                : grid::greedy_assign(pca.coords, rows, cols);
  layout = grid::overlay_values(std::move(layout), labels, outputs, config.hard_labels);
  const ImageTensor montage = render::montage(layout, images, config.tile, config.alpha);

  ReportInputs report{layout, labels, outputs, splits, std::to_string(config.seed),
                      config.assigner, effective_config(config)};
  std::ostringstream report_text;
  write_report(report, report_text);

  const fs::path& dir = config.out_dir;
  fs::create_directories(dir);
  pca::write_coords_csv(pca.coords, dir / kCoordsFile);
  grid::write_layout_csv(layout, dir / kLayoutFile);
  render::write_png(montage, dir / kMontageFile);
  {
    std::ofstream out = open_output(dir / kPredictionsFile);
    out << "index,path,label,output,split\n";
    for (std::size_t i = 0; i < n; ++i) {
      fmt::print(out, "{},{},{},{:.17g},{}\n", i, manifest.records[i].image_path.generic_string(),
                 labels[i], outputs[i], splits[i].value_or(""));
    }
  }
  write_grid_file(layout.spec, config.assigner, config, dir / kAuditFile);
  open_output(dir / kReportFile) << report_text.str();
}

void cmd_saliency(const RunConfig& config) {
  validate(config, Command::kSaliency);
  const nn::ModelFile file = nn::load_model(config.model);
  file.model.require_binary_head();
  std::set<std::string> stems;
  for (const auto& p : config.images) {
    if (!stems.insert(p.stem().string()).second) {
      throw std::invalid_argument("two input images share the name " + p.stem().string());
    }
  }
  std::vector<std::pair<ImageTensor, ImageTensor>> rendered;
  for (const auto& p : config.images) {
    const ImageTensor image = prepare_for_model(ingest::decode_image(p), file.model.input_shape());
    const ImageTensor map = nn::input_saliency(file.model, image);
    rendered.emplace_back(render::saliency_overlay(image, map, config.saliency_alpha), map);
  }
  fs::create_directories(config.out_dir);
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    const std::string stem = config.images[i].stem().string();
    render::write_png(rendered[i].first, config.out_dir / (stem + "_saliency.png"));
    render::write_png(rendered[i].second, config.out_dir / (stem + "_saliency_map.png"));
  }
}

void cmd_report(const RunConfig& config) {
  validate(config, Command::kReport);
  const fs::path dir = config.audit_dir.empty() ? config.out_dir : config.audit_dir;
  namespace pt = boost::property_tree;
  pt::ptree audit;
  try {
    pt::read_ini((dir / kAuditFile).string(), audit);
  } catch (const pt::ptree_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", (dir / kAuditFile).string(), e.what()));
  }
  ReportInputs in;
  grid::GridSpec spec;
  try {
    const pt::ptree& g = audit.get_child("grid");
    spec.rows = g.get<std::size_t>("rows");
    spec.cols = g.get<std::size_t>("cols");
    spec.x_min = g.get<double>("x_min");
    spec.x_max = g.get<double>("x_max");
    spec.y_min = g.get<double>("y_min");
    spec.y_max = g.get<double>("y_max");
    spec.d1 = g.get<double>("d1");
    spec.d2 = g.get<double>("d2");
    in.assigner = g.get<std::string>("assigner");
    for (const auto& [k, v] : audit.get_child("config")) in.config.emplace_back(k, v.data());
  } catch (const pt::ptree_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", (dir / kAuditFile).string(), e.what()));
  }
  for (const auto& [k, v] : in.config) {
    if (k == "run.seed") in.seed = v;
  }
  in.layout = grid::read_layout_csv(dir / kLayoutFile, spec);

  std::ifstream preds(dir / kPredictionsFile);
  std::string line;
  std::getline(preds, line);
  std::size_t line_no = 1;
  while (std::getline(preds, line)) {
    ++line_no;
    if (line.empty()) continue;
    // index,path,label,output,split -- the path may itself contain commas.
    const auto first = line.find(',');
    const auto last = line.rfind(',');
    const auto out_pos = line.rfind(',', last - 1);
    const auto label_pos = line.rfind(',', out_pos - 1);
    if (first == std::string::npos || label_pos == std::string::npos || label_pos < first) {
      throw std::runtime_error(fmt::format("{}:{}: malformed row",
                                           (dir / kPredictionsFile).string(), line_no));
    }
    in.labels.push_back(std::stoi(line.substr(label_pos + 1, out_pos - label_pos - 1)));
    in.outputs.push_back(std::stod(line.substr(out_pos + 1, last - out_pos - 1)));
    const std::string split = line.substr(last + 1);
    in.splits.push_back(split.empty() ? std::nullopt : std::optional<std::string>(split));
  }
  std::ostringstream text;
  write_report(in, text);
  fs::create_directories(config.out_dir);
  open_output(config.out_dir / kReportFile) << text.str();
}

void run(Command command, const RunConfig& config) {
  switch (command) {
    case Command::kSynth: return cmd_synth(config);
    case Command::kTrain: return cmd_train(config);
    case Command::kAudit: return cmd_audit(config);
    case Command::kSaliency: return cmd_saliency(config);
    case Command::kReport: return cmd_report(config);
  }
}

}  // namespace fairgrid::cli
