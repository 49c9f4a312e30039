// Copyright 2026 The vocbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// vocbench: dataset preparation and detector evaluation from the command line.
//
// Exit status: 0 on success, 1 on usage or validation errors, 2 on IO errors.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vocbench/vocbench.hpp"

namespace vb = vocbench;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string run_manifest;
  bool verbose = false;
};

// What a run read and wrote, recorded next to its outputs.
struct RunRecord {
  std::string command;
  json options = json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

std::string Hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void WriteRunManifest(const Globals& g, const RunRecord& run, const fs::path& fallback) {
  const fs::path path = g.run_manifest.empty() ? fallback : fs::path(g.run_manifest);
  if (path.empty()) return;
  json j;
  j["command"] = run.command;
  j["seed"] = g.seed;
  j["config"] = g.config.empty() ? json(nullptr) : json(g.config);
  j["config_hash"] =
      g.config.empty() ? json(nullptr) : json("fnv1a64:" + Hex(vb::Fnv1a64(vb::ReadTextFile(g.config))));
  j["options"] = run.options;
  j["inputs"] = run.inputs;
  j["outputs"] = run.outputs;
  vb::WriteTextFile(path, j.dump(2) + "\n");
}

void Log(const std::string& msg) { std::cerr << msg << "\n"; }

// Ground truth from an annotation directory or a split manifest CSV.
std::vector<vb::ImageAnnotation> LoadGroundTruth(const fs::path& path) {
  if (fs::is_directory(path)) return vb::LoadAnnotationDir(path);
  const vb::SplitManifest split = vb::ReadManifest(path);
  std::vector<vb::ImageAnnotation> out;
  for (const auto& item : split.items) {
    out.push_back(vb::LoadAnnotationFile(path.parent_path() / item.xml_path));
  }
  return out;
}

// Detections for the images present in `gts`; other files are ignored.
std::vector<vb::Detection> LoadDetectionsFor(const fs::path& dir, const vb::GroundTruthSet& gts) {
  std::vector<vb::Detection> out;
  std::size_t ignored = 0;
  for (auto& d : vb::LoadDetectionDir(dir)) {
    if (gts.count(d.image_id)) {
      out.push_back(std::move(d));
    } else {
      ++ignored;
    }
  }
  if (ignored) Log("note: ignored " + std::to_string(ignored) + " detections on unlisted images");
  return out;
}

std::pair<std::string, std::string> NamedPath(const std::string& spec, const char* flag) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    vb::Fail(vb::ErrorKind::kUsage, std::string(flag) + " expects NAME=PATH, got '" + spec + "'");
  }
  return {spec.substr(0, eq), spec.substr(eq + 1)};
}

json ReadJson(const fs::path& path) {
  const std::string text = vb::ReadTextFile(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    vb::Fail(vb::ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

struct SubsampleArgs {
  std::string frames;
  std::string annotations;
  double interval = 3.0;
  std::string out;
};

void RunSubsample(const Globals& g, const SubsampleArgs& a) {
  const fs::path frames_path = a.frames;
  const fs::path base = frames_path.parent_path();
  const fs::path ann_dir = a.annotations.empty() ? base / "annotations" : fs::path(a.annotations);
  const auto frames = vb::ParseFramesCsv(vb::ReadTextFile(frames_path));
  const auto kept = vb::SubsampleFrames(frames, a.interval);
  const fs::path out = a.out;
  vb::EnsureDirectory(out / "images");
  vb::EnsureDirectory(out / "annotations");
  std::vector<vb::FrameRecord> written;
  std::size_t unlabeled = 0;
  for (const auto& f : kept) {
    const fs::path src = fs::path(f.path).is_absolute() ? fs::path(f.path) : base / f.path;
    std::error_code ec;
    fs::copy_file(src, out / "images" / src.filename(), fs::copy_options::overwrite_existing, ec);
    if (ec) vb::Fail(vb::ErrorKind::kIo, "cannot copy '" + src.string() + "': " + ec.message());
    const fs::path xml = ann_dir / (src.stem().string() + ".xml");
    if (fs::is_regular_file(xml)) {
      vb::WriteTextFile(out / "annotations" / xml.filename(), vb::ReadTextFile(xml));
    } else {
      ++unlabeled;
    }
    written.push_back({"images/" + src.filename().string(), f.timestamp});
  }
  vb::WriteTextFile(out / "frames.csv", vb::FramesCsv(written));
  Log("subsample: kept " + std::to_string(kept.size()) + " of " + std::to_string(frames.size()) +
      " frames");
  if (unlabeled) Log("warning: " + std::to_string(unlabeled) + " kept frames have no annotation");
  RunRecord run{"subsample", {{"interval", a.interval}}, {a.frames, ann_dir.generic_string()}, {a.out}};
  WriteRunManifest(g, run, out / "run_manifest.json");
}

struct TileArgs {
  std::string in;
  std::string out;
  std::uint32_t size = 300;
  double min_overlap = 0.20;
  double min_visible = 0.30;
  double min_side = 10;
  bool drop_empty = false;
};

void RunTile(const Globals& g, const TileArgs& a) {
  vb::TileOptions opts;
  opts.size = a.size;
  opts.min_overlap = a.min_overlap;
  opts.keep = {a.min_visible, a.min_side};
  opts.drop_empty = a.drop_empty;
  opts.jobs = g.jobs;
  const fs::path in = a.in;
  const auto anns = vb::LoadAnnotationDir(in / "annotations");
  const auto records = vb::TileDataset(anns, in / "images", a.out, opts);
  std::size_t boxes = 0;
  for (const auto& r : records) boxes += r.n_boxes;
  Log("tile: " + std::to_string(anns.size()) + " images -> " + std::to_string(records.size()) +
      " tiles, " + std::to_string(boxes) + " boxes");
  RunRecord run{"tile",
                {{"size", a.size},
                 {"min_overlap", a.min_overlap},
                 {"min_visible", a.min_visible},
                 {"min_side", a.min_side},
                 {"drop_empty", a.drop_empty}},
                {a.in},
                {a.out}};
  WriteRunManifest(g, run, fs::path(a.out) / "run_manifest.json");
}

struct AugmentArgs {
  std::string in;
  std::string out;
  std::uint32_t multiplicity = 3;
  std::string only;
  double min_visible = 0.30;
  double min_side = 10;
};

void RunAugment(const Globals& g, const AugmentArgs& a) {
  const fs::path in = a.in;
  auto anns = vb::LoadAnnotationDir(in / "annotations");
  RunRecord run{"augment",
                {{"multiplicity", a.multiplicity},
                 {"min_visible", a.min_visible},
                 {"min_side", a.min_side}},
                {a.in},
                {a.out}};
  if (!a.only.empty()) {
    std::set<std::string> ids;
    for (const auto& item : vb::ReadManifest(a.only, false).items) ids.insert(item.id);
    std::erase_if(anns, [&](const auto& ann) { return !ids.count(ann.image_id); });
    run.inputs.push_back(a.only);
  }
  vb::AugmentOptions opts;
  opts.multiplicity = a.multiplicity;
  opts.seed = g.seed;
  opts.keep = {a.min_visible, a.min_side};
  opts.jobs = g.jobs;
  const auto records = vb::AugmentDataset(anns, in / "images", in / "annotations", a.out, opts);
  Log("augment: " + std::to_string(anns.size()) + " sources + " +
      std::to_string(records.size()) + " augmented copies");
  WriteRunManifest(g, run, fs::path(a.out) / "run_manifest.json");
}

struct SplitArgs {
  std::string in;
  std::string out;
  double train_fraction = 0.8;
  bool group_by_parent = false;
  bool val_originals_only = false;
};

void RunSplit(const Globals& g, const SplitArgs& a) {
  const fs::path in = a.in;
  std::vector<std::string> ids;
  for (const auto& p : vb::ListFiles(in / "annotations", ".xml")) ids.push_back(p.stem().string());
  vb::SplitResult split = a.group_by_parent
                              ? vb::SplitTrainValByParent(ids, a.train_fraction, g.seed)
                              : vb::SplitTrainVal(ids, a.train_fraction, g.seed);
  for (const auto& w : split.warnings) Log("warning: " + w);
  if (a.val_originals_only) {
    const std::size_t before = split.val.size();
    std::erase_if(split.val, vb::IsAugmentedId);
    Log("split: dropped " + std::to_string(before - split.val.size()) +
        " augmented items from val");
  }
  const fs::path out = a.out;
  for (const auto& [name, members] : {std::pair{"train", &split.train}, {"val", &split.val}}) {
    const auto manifest = vb::BuildManifest(name, *members, in, out);
    vb::WriteManifest(manifest, out);
    Log(std::string("split: ") + name + " " + std::to_string(manifest.image_count()) +
        " images, " + std::to_string(manifest.annotation_count()) + " annotations");
  }
  RunRecord run{"split",
                {{"train_fraction", a.train_fraction},
                 {"group_by_parent", a.group_by_parent},
                 {"val_originals_only", a.val_originals_only}},
                {a.in},
                {(out / "train.csv").generic_string(), (out / "val.csv").generic_string()}};
  WriteRunManifest(g, run, out / "run_manifest.json");
}

struct EvalArgs {
  std::string gt;
  std::string det;
  double iou = 0.5;
  double threshold_pct = 0;
  std::string threshold_from;
  std::string interpolation = "all-point";
  std::string model;
  std::string out;
  std::string curve_csv;
};

void RunEvaluate(const Globals& g, const EvalArgs& a) {
  vb::EvalConfig config;
  config.iou_threshold = a.iou;
  config.interpolation = vb::InterpolationFromName(a.interpolation);
  double pct = a.threshold_pct;
  RunRecord run{"evaluate", {}, {a.gt, a.det}, {}};
  if (!a.threshold_from.empty()) {
    pct = vb::SweepFromJson(ReadJson(a.threshold_from)).best_threshold_pct;
    run.inputs.push_back(a.threshold_from);
  }
  if (!(pct >= 0 && pct <= 100)) vb::Fail(vb::ErrorKind::kRange, "threshold must lie in [0, 100]");
  config.confidence_threshold = pct / 100.0;
  const auto gts = vb::GroundTruthFrom(LoadGroundTruth(a.gt));
  const auto dets = LoadDetectionsFor(a.det, gts);
  const auto report = vb::Evaluate(dets, gts, config);
  const std::string text = vb::ReportJson(report, a.model).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    vb::WriteTextFile(a.out, text);
    run.outputs.push_back(a.out);
  }
  if (!a.curve_csv.empty()) {
    std::size_t with_gt = 0;
    for (const auto& [label, r] : report.per_class) with_gt += r.tp + r.fn > 0;
    const fs::path csv = a.curve_csv;
    for (const auto& [label, r] : report.per_class) {
      if (r.tp + r.fn == 0) continue;
      const fs::path path =
          with_gt == 1 ? csv
                       : csv.parent_path() / (csv.stem().string() + "_" + label + csv.extension().string());
      vb::WriteTextFile(path, vb::PrCurveCsv(r.curve));
      run.outputs.push_back(path.generic_string());
    }
  }
  Log("evaluate: mAP " + vb::FormatPercent(report.map) + ", P " +
      vb::FormatPercent(report.precision) + ", R " + vb::FormatPercent(report.recall) + ", F1 " +
      vb::FormatPercent(report.f1) + " at confidence >= " + vb::FormatThresholdPct(pct));
  run.options = {{"iou", a.iou},
                 {"threshold_pct", pct},
                 {"interpolation", a.interpolation},
                 {"model", a.model}};
  WriteRunManifest(g, run, a.out.empty() ? fs::path() : fs::path(a.out + ".run.json"));
}

struct CalibrateArgs {
  std::string gt;
  std::string det;
  double iou = 0.5;
  double step_pct = 1;
  std::string model;
  std::string out;
  std::string sweep_csv;
};

void RunCalibrate(const Globals& g, const CalibrateArgs& a) {
  const auto gts = vb::GroundTruthFrom(LoadGroundTruth(a.gt));
  const auto dets = LoadDetectionsFor(a.det, gts);
  const auto sweep = vb::Sweep(dets, gts, a.iou, vb::ThresholdSteps(a.step_pct / 100.0));
  json j = vb::CalibrationJson(sweep, a.iou);
  if (!a.model.empty()) j["model"] = a.model;
  RunRecord run{"calibrate",
                {{"iou", a.iou}, {"step_pct", a.step_pct}, {"model", a.model}},
                {a.gt, a.det},
                {}};
  const std::string text = j.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    vb::WriteTextFile(a.out, text);
    run.outputs.push_back(a.out);
  }
  if (!a.sweep_csv.empty()) {
    vb::WriteTextFile(a.sweep_csv, vb::SweepCsv(sweep));
    run.outputs.push_back(a.sweep_csv);
  }
  Log("calibrate: best confidence >= " + vb::FormatThresholdPct(sweep.best_threshold_pct) +
      " with F1 " + vb::FormatPercent(sweep.best_f1));
  WriteRunManifest(g, run, a.out.empty() ? fs::path() : fs::path(a.out + ".run.json"));
}

struct ReportArgs {
  std::vector<std::string> evals;
  std::vector<std::string> timings;
  std::vector<std::string> calibrations;
  std::string format = "csv";
  std::string out;
  std::string calibration_table;
  std::string plots;
};

void RunReport(const Globals& g, const ReportArgs& a) {
  const vb::TableFormat format =
      a.format == "markdown" ? vb::TableFormat::kMarkdown : vb::TableFormat::kCsv;
  RunRecord run{"report", {{"format", a.format}}, {}, {}};

  std::map<std::string, double> timing;
  for (const auto& spec : a.timings) {
    const auto [name, path] = NamedPath(spec, "--timing");
    const auto stats = vb::ComputeTimingStats(vb::ParseTimingLog(vb::ReadTextFile(path), name));
    timing[name] = stats.mean_ms;
    if (g.verbose) {
      Log("timing " + name + ": mean " + vb::FormatFixed2(stats.mean_ms) + " ms, median " +
          vb::FormatFixed2(stats.median_ms) + " ms, p95 " + vb::FormatFixed2(stats.p95_ms) +
          " ms over " + std::to_string(stats.count) + " images");
    }
    run.inputs.push_back(path);
  }
  std::vector<std::pair<std::string, vb::SweepResult>> calibrations;
  for (const auto& spec : a.calibrations) {
    const auto [name, path] = NamedPath(spec, "--calibration");
    calibrations.emplace_back(name, vb::SweepFromJson(ReadJson(path)));
    run.inputs.push_back(path);
  }
  std::vector<std::pair<std::string, vb::EvalReport>> evals;
  std::vector<vb::SummaryRow> rows;
  for (const auto& spec : a.evals) {
    const auto [name, path] = NamedPath(spec, "--eval");
    evals.emplace_back(name, vb::ReportFromJson(ReadJson(path)));
    const auto it = timing.find(name);
    rows.push_back(vb::SummaryFrom(
        name, evals.back().second,
        it == timing.end() ? std::nullopt : std::optional<double>(it->second)));
    run.inputs.push_back(path);
  }

  const std::string summary = vb::EmitSummary(rows, format);
  if (a.out.empty()) {
    std::cout << summary;
  } else {
    vb::WriteTextFile(a.out, summary);
    run.outputs.push_back(a.out);
  }
  if (!calibrations.empty()) {
    std::vector<vb::CalibrationRow> cal_rows;
    for (const auto& [name, s] : calibrations) cal_rows.push_back({name, s.best_threshold_pct, s.best_f1});
    const std::string table = vb::EmitCalibrationTable(cal_rows, format);
    if (a.calibration_table.empty()) {
      std::cout << "\n" << table;
    } else {
      vb::WriteTextFile(a.calibration_table, table);
      run.outputs.push_back(a.calibration_table);
    }
  }

  if (!a.plots.empty()) {
    const fs::path dir = a.plots;
    vb::EnsureDirectory(dir);
    const auto curve_of = [](const vb::EvalReport& r) -> const vb::PRCurve* {
      const vb::PRCurve* only = nullptr;
      for (const auto& [_, c] : r.per_class) {
        if (c.tp + c.fn == 0) continue;
        if (only) return nullptr;
        only = &c.curve;
      }
      return only;
    };
    const auto points = [](const vb::PRCurve& c) {
      vb::PlotSeries s;
      for (const auto& p : c.points) s.points.push_back({p.recall, p.precision});
      return s;
    };
    const auto emit = [&](const std::string& file, vb::PlotKind kind,
                          const std::vector<vb::PlotSeries>& series, const std::string& title) {
      bool any = false;
      for (const auto& s : series) any = any || !s.points.empty();
      if (!any) return;
      vb::WriteTextFile(dir / file, vb::EmitPlot(kind, series, title));
      run.outputs.push_back((dir / file).generic_string());
    };
    std::vector<vb::PlotSeries> pr, truncated;
    for (const auto& [name, r] : evals) {
      const vb::PRCurve* curve = curve_of(r);
      if (!curve) {
        Log("note: '" + name + "' is multi-class; its curve is left out of the plots");
        continue;
      }
      auto s = points(*curve);
      s.name = name;
      pr.push_back(s);
      for (const auto& [cal_name, sweep] : calibrations) {
        if (cal_name != name) continue;
        auto t = points(vb::TruncateCurve(*curve, sweep.best_threshold_pct / 100.0));
        t.name = name + " (>= " + vb::FormatThresholdPct(sweep.best_threshold_pct) + ")";
        truncated.push_back(t);
      }
    }
    emit("pr_curve.svg", vb::PlotKind::kPrCurve, pr, "Precision x recall");
    emit("pr_curve_calibrated.svg", vb::PlotKind::kPrCurve, truncated,
         "Precision x recall at the calibrated threshold");
    std::vector<vb::PlotSeries> f1, counts;
    for (const auto& [name, sweep] : calibrations) {
      vb::PlotSeries f{name, {}}, tp{name + " TP", {}}, fp{name + " FP", {}}, fn{name + " FN", {}};
      for (const auto& row : sweep.rows) {
        const double x = row.threshold_pct / 100.0;
        f.points.push_back({x, row.f1});
        tp.points.push_back({x, static_cast<double>(row.tp)});
        fp.points.push_back({x, static_cast<double>(row.fp)});
        fn.points.push_back({x, static_cast<double>(row.fn)});
      }
      f1.push_back(f);
      counts.insert(counts.end(), {tp, fp, fn});
    }
    emit("f1_vs_threshold.svg", vb::PlotKind::kF1VsThreshold, f1, "F1-score vs confidence threshold");
    emit("counts_vs_threshold.svg", vb::PlotKind::kCountsVsThreshold, counts,
         "TP, FP and FN vs confidence threshold");
  }
  WriteRunManifest(g, run,
                   !a.plots.empty() ? fs::path(a.plots) / "run_manifest.json"
                   : !a.out.empty() ? fs::path(a.out + ".run.json")
                                    : fs::path());
}

int ExitCodeFor(vb::ErrorKind kind) { return kind == vb::ErrorKind::kIo ? 2 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dataset preparation and detector evaluation for Pascal VOC style data.",
               "vocbench"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.set_config("--config", "", "TOML-style file of option values; [subcommand] sections apply");
  app.add_option("--seed", g.seed, "Seed for augmentation and splitting")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--run-manifest", g.run_manifest, "Where to write the run manifest JSON");
  app.add_flag("-v,--verbose", g.verbose, "Extra statistics on stderr");

  SubsampleArgs sub;
  auto* s = app.add_subcommand("subsample", "Keep one frame per interval from a frame sequence");
  s->add_option("--frames", sub.frames, "CSV of path,timestamp (paths relative to the CSV)")
      ->required();
  s->add_option("--annotations", sub.annotations, "XML directory (default: <csv dir>/annotations)");
  s->add_option("--interval", sub.interval, "Seconds between kept frames")->capture_default_str();
  s->add_option("--out", sub.out, "Output dataset directory")->required();

  TileArgs tile;
  auto* t = app.add_subcommand("tile", "Cut images into overlapping square tiles");
  t->add_option("--in", tile.in, "Dataset directory with images/ and annotations/")->required();
  t->add_option("--out", tile.out, "Output dataset directory")->required();
  t->add_option("--size", tile.size, "Tile side in pixels")->capture_default_str();
  t->add_option("--min-overlap", tile.min_overlap, "Minimum overlap ratio")->capture_default_str();
  t->add_option("--min-visible", tile.min_visible, "Minimum visible box fraction")
      ->capture_default_str();
  t->add_option("--min-side", tile.min_side, "Minimum clipped box side in pixels")
      ->capture_default_str();
  t->add_flag("--drop-empty", tile.drop_empty, "Skip tiles without boxes");

  AugmentArgs aug;
  auto* au = app.add_subcommand("augment", "Add seeded, box-aware transformed copies");
  au->add_option("--in", aug.in, "Dataset directory with images/ and annotations/")->required();
  au->add_option("--out", aug.out, "Output dataset directory")->required();
  au->add_option("--multiplicity", aug.multiplicity, "Augmented copies per source image")
      ->capture_default_str();
  au->add_option("--only", aug.only, "Restrict to the ids of this split manifest");
  au->add_option("--min-visible", aug.min_visible, "Minimum visible box fraction")
      ->capture_default_str();
  au->add_option("--min-side", aug.min_side, "Minimum box side in pixels")->capture_default_str();

  SplitArgs split;
  auto* sp = app.add_subcommand("split", "Write train/val manifests");
  sp->add_option("--in", split.in, "Dataset directory with images/ and annotations/")->required();
  sp->add_option("--out", split.out, "Directory for train.csv and val.csv")->required();
  sp->add_option("--train-fraction", split.train_fraction, "Share of items in train")
      ->capture_default_str();
  sp->add_flag("--group-by-parent", split.group_by_parent, "Keep tiles of one frame together");
  sp->add_flag("--val-originals-only", split.val_originals_only,
               "Drop augmented copies from the validation manifest");

  EvalArgs ev;
  auto* e = app.add_subcommand("evaluate", "Match detections to ground truth and report metrics");
  e->add_option("--gt", ev.gt, "Annotation directory or split manifest CSV")->required();
  e->add_option("--det", ev.det, "Directory of <image_id>.txt detection files")->required();
  e->add_option("--iou", ev.iou, "IoU threshold")->capture_default_str();
  auto* thr = e->add_option("--threshold", ev.threshold_pct, "Confidence threshold in percent")
                  ->capture_default_str();
  e->add_option("--threshold-from", ev.threshold_from, "Calibration JSON to take the threshold from")
      ->excludes(thr);
  e->add_option("--interpolation", ev.interpolation, "all-point or 11-point")
      ->check(CLI::IsMember({"all-point", "11-point"}))
      ->capture_default_str();
  e->add_option("--model", ev.model, "Model name recorded in the report");
  e->add_option("--out", ev.out, "Report JSON path (default: stdout)");
  e->add_option("--curve-csv", ev.curve_csv, "Precision x recall curve CSV path");

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Sweep the confidence threshold and pick the best F1");
  c->add_option("--gt", cal.gt, "Annotation directory or split manifest CSV")->required();
  c->add_option("--det", cal.det, "Directory of <image_id>.txt detection files")->required();
  c->add_option("--iou", cal.iou, "IoU threshold")->capture_default_str();
  c->add_option("--step", cal.step_pct, "Threshold step in percent; must divide 100")
      ->capture_default_str();
  c->add_option("--model", cal.model, "Model name recorded in the JSON");
  c->add_option("--out", cal.out, "Calibration JSON path (default: stdout)");
  c->add_option("--sweep-csv", cal.sweep_csv, "Per-threshold sweep CSV path");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Summary tables and SVG plots");
  r->add_option("--eval", rep.evals, "NAME=report.json (repeatable)");
  r->add_option("--timing", rep.timings, "NAME=timing log (repeatable)");
  r->add_option("--calibration", rep.calibrations, "NAME=calibration.json (repeatable)");
  r->add_option("--format", rep.format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}))
      ->capture_default_str();
  r->add_option("--out", rep.out, "Summary table path (default: stdout)");
  r->add_option("--calibration-table", rep.calibration_table,
                "Calibration table path (default: stdout)");
  r->add_option("--plots", rep.plots, "Directory for SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }
  if (auto* opt = app.get_option("--config"); opt->count() > 0) g.config = opt->as<std::string>();

  try {
    if (*s) RunSubsample(g, sub);
    if (*t) RunTile(g, tile);
    if (*au) RunAugment(g, aug);
    if (*sp) RunSplit(g, split);
    if (*e) RunEvaluate(g, ev);
    if (*c) RunCalibrate(g, cal);
    if (*r) RunReport(g, rep);
  } catch (const vb::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return ExitCodeFor(err.kind());
  } catch (const fs::filesystem_error& err) {
    std::cerr << "error: io: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
