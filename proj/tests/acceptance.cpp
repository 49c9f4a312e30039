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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"

namespace vocbench {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

// ---------------------------------------------------------------- AC1

struct TableRow {
  std::string model;
  double threshold_pct, precision_pct, recall_pct, f1_pct;
};

// Rows of the evaluation table: model & conf & time & mAP & P & R & F1.
std::vector<TableRow> ReadEvaluationTable(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  const auto label = text.find("\\label{tab:evaluation-results}");
  if (label == std::string::npos) throw std::runtime_error("evaluation table not found");
  const auto end = text.find("\\bottomrule", label);
  std::istringstream lines(text.substr(label, end - label));
  const std::regex si(R"(\\SI\{([0-9.]+)\})");
  std::vector<TableRow> rows;
  for (std::string line; std::getline(lines, line);) {
    if (line.find("\\milli\\second") == std::string::npos) continue;
    std::vector<double> v;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), si);
         it != std::sregex_iterator(); ++it) {
      v.push_back(std::stod((*it)[1].str()));
    }
    if (v.size() != 6) throw std::runtime_error("unexpected row: " + line);
    const auto amp = line.find('&');
    std::string model = line.substr(0, amp);
    while (!model.empty() && model.back() == ' ') model.pop_back();
    rows.push_back({model, v[0], v[3], v[4], v[5]});
  }
  return rows;
}

Outcome Ac1() {
  const auto rows = ReadEvaluationTable(VOCBENCH_PUBLISHED_RESULTS);
  if (rows.size() != 10) return {false, std::to_string(rows.size()) + " rows parsed, expected 10"};
  const double tol = 0.01 + 1e-9;
  double worst = 0;
  std::string failures;
  for (const auto& r : rows) {
    const double f1 = 100 * F1(r.precision_pct / 100, r.recall_pct / 100);
    const double dev = std::abs(f1 - r.f1_pct);
    worst = std::max(worst, dev);
    if (dev > tol) {
      // Bounds of F1 over inputs that round to the printed two decimals.
      const double lo = 100 * F1((r.precision_pct - 0.005) / 100, (r.recall_pct - 0.005) / 100);
      const double hi = 100 * F1((r.precision_pct + 0.005) / 100, (r.recall_pct + 0.005) / 100);
      failures += "; " + r.model + " @" + Fmt("%.0f%%", r.threshold_pct) + ": f1(" +
                  Fmt("%.2f", r.precision_pct) + ", " + Fmt("%.2f", r.recall_pct) + ") = " +
                  Fmt("%.4f", f1) + " vs printed " + Fmt("%.2f", r.f1_pct) + " (|d| " +
                  Fmt("%.4f", dev) + " pp; unrounded inputs give [" + Fmt("%.3f", lo) + ", " +
                  Fmt("%.3f", hi) + "])";
    }
  }
  return {failures.empty(), "10 rows, worst |d| " + Fmt("%.4f", worst) + " pp, tolerance 0.01 pp" +
                                failures};
}

// ---------------------------------------------------------------- AC2

Outcome Ac2() {
  Rng rng(20240601);
  const EvalConfig config;
  std::size_t tp_total = 0, fp_total = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto s = testing::RandomScene(rng, 6, 6);
    const MatchOutcome m = MatchDetections(s.dets, s.gts, config);
    if (m.tp + m.fn != s.gts.size() || m.tp + m.fp != s.dets.size()) {
      return {false, "conservation violated in trial " + std::to_string(trial)};
    }
    std::vector<bool> flags;
    const auto expected = oracle::GreedyMatch(s.dets, s.gts, 0.5, 0, &flags);
    if (expected != oracle::Counts{m.tp, m.fp, m.fn}) {
      return {false, "counts differ from the brute-force oracle in trial " + std::to_string(trial)};
    }
    for (const auto& dm : m.matches) {
      if ((dm.flag == MatchFlag::kTruePositive) != flags[dm.detection]) {
        return {false, "TP flags differ from the oracle in trial " + std::to_string(trial)};
      }
    }
    tp_total += m.tp;
    fp_total += m.fp;
  }
  return {true, "10000 scenes, " + std::to_string(tp_total) + " TP / " +
                    std::to_string(fp_total) + " FP, all equal to oracle"};
}

// ---------------------------------------------------------------- AC3

Outcome Ac3() {
  const GroundTruthSet hand_gts{{"img", {{"t", {0, 0, 10, 10}}, {"t", {20, 20, 30, 30}}}}};
  const std::vector<Detection> hand = {{"img", "t", 0.9, {0, 0, 10, 10}},
                                       {"img", "t", 0.8, {50, 50, 60, 60}},
                                       {"img", "t", 0.7, {20, 20, 30, 30}}};
  const double hand_ap = AveragePrecision(PrCurve(hand, hand_gts, {}), Interpolation::kAllPoint);
  if (std::abs(hand_ap - 5.0 / 6.0) > 1e-12) return {false, "hand case AP " + Fmt("%.12f", hand_ap)};

  Rng rng(31337);
  double worst = 0;
  int scenes = 0;
  while (scenes < 100) {
    auto [dets, gts] = testing::RandomSet(rng, 1 + rng.Below(3), 6, 6);
    if (detail::CountGroundTruths(gts) == 0) continue;
    ++scenes;
    const auto curve = PrCurve(dets, gts, {});
    std::vector<std::array<double, 2>> rp;
    for (const auto& p : curve.points) rp.push_back({p.recall, p.precision});
    worst = std::max(worst, std::abs(AveragePrecision(curve, Interpolation::kAllPoint) -
                                     oracle::IntegratedAp(rp)));
  }
  return {worst <= 1e-9, "hand case " + Fmt("%.6f", hand_ap) + ", 100 scenes, worst |d| " +
                             Fmt("%.2e", worst) + " (tolerance 1e-9)"};
}

// ---------------------------------------------------------------- AC4

Outcome Ac4() {
  const TilePlan plan = PlanTiles(1280, 720, 300, 0.2);
  if (plan.tiles.size() != 18) return {false, std::to_string(plan.tiles.size()) + " tiles"};
  std::vector<bool> covered(1280 * 720, false);
  for (const auto& t : plan.tiles) {
    for (std::uint32_t y = t.y0; y < t.y0 + t.size; ++y) {
      for (std::uint32_t x = t.x0; x < t.x0 + t.size; ++x) covered[y * 1280 + x] = true;
    }
  }
  if (std::find(covered.begin(), covered.end(), false) != covered.end()) {
    return {false, "uncovered pixels"};
  }
  const auto gaps = [](const std::vector<std::uint32_t>& o) {
    std::set<std::uint32_t> g;
    for (std::size_t i = 1; i < o.size(); ++i) g.insert(o[i] - o[i - 1]);
    return g;
  };
  if (gaps(plan.x_offsets) != std::set<std::uint32_t>{196} ||
      gaps(plan.y_offsets) != std::set<std::uint32_t>{210}) {
    return {false, "strides are not uniformly 196 (x) and 210 (y)"};
  }
  for (const auto& a : plan.tiles) {
    for (const auto& b : plan.tiles) {
      const bool adjacent = (a.row == b.row && a.col + 1 == b.col) ||
                            (a.col == b.col && a.row + 1 == b.row);
      if (!adjacent) continue;
      const double overlap = a.row == b.row ? a.x0 + 300.0 - b.x0 : a.y0 + 300.0 - b.y0;
      if (overlap < 60) return {false, "adjacent overlap " + Fmt("%.0f", overlap) + " < 60"};
    }
  }

  std::size_t axes = 0;
  for (const std::uint32_t size : {128u, 300u, 512u}) {
    const std::uint32_t need = (size * 20 + 99) / 100;
    for (std::uint32_t length = size; length <= 2000; ++length) {
      const auto o = AxisOffsets(length, size, 0.2);
      if (o.size() != oracle::MinimalTileCount(length, size, 20)) {
        return {false, "not minimal at L=" + std::to_string(length) + " S=" + std::to_string(size)};
      }
      if (o.front() != 0 || o.back() + size != length) {
        return {false, "edges uncovered at L=" + std::to_string(length)};
      }
      for (std::size_t i = 1; i < o.size(); ++i) {
        if (o[i] <= o[i - 1] || o[i - 1] + size < o[i] + need) {
          return {false, "overlap below " + std::to_string(need) + " px at L=" +
                             std::to_string(length) + " S=" + std::to_string(size)};
        }
      }
      ++axes;
    }
  }
  return {true, "18 tiles, strides 196/210, overlaps >= 90 px; " + std::to_string(axes) +
                    " axis plans minimal"};
}

// ---------------------------------------------------------------- AC5

Outcome Ac5() {
  const KeepPolicy keep_all{0.0, 0.0};
  Rng rng(55);
  Raster image(301, 97, 3);
  for (auto& px : image.pixels) px = static_cast<std::uint8_t>(rng.Below(256));
  std::vector<GroundTruthObject> boxes;
  for (int i = 0; i < 50; ++i) boxes.push_back({"t", testing::RandomBox(rng, 97)});
  const auto once = ApplyGeometric(image, boxes, Flip{}, keep_all);
  const auto twice = ApplyGeometric(once.image, once.objects, Flip{}, keep_all);
  if (!(twice.image == image) || twice.objects.size() != boxes.size()) {
    return {false, "flip is not an involution"};
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (twice.objects[i].bbox != boxes[i].bbox) return {false, "flip moved a box"};
  }

  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const bool rotate = trial % 2 == 0;
    const double angle = rotate ? rng.Uniform(-60, 60) : 0;
    const double scale = rotate ? 1.0 : rng.Uniform(0.5, 1.5);
    const BBox box = testing::RandomBox(rng, 300, 20);
    const SingleOp op = rotate ? SingleOp{Rotation{angle}} : SingleOp{Scaling{scale}};
    const auto out = ApplyGeometric(Raster(300, 300, 1), {{"t", box}}, op, keep_all);
    const auto expected = oracle::RasterizedHull(box, angle, scale, 300, 300);
    if (out.objects.empty() != !expected) {
      const BBox& only = expected ? *expected : out.objects[0].bbox;
      if (std::min(only.width(), only.height()) > 1.0) {
        return {false, "box presence disagrees with the rasterization in trial " +
                           std::to_string(trial)};
      }
      continue;
    }
    if (!expected) continue;
    const BBox& got = out.objects[0].bbox;
    worst = std::max({worst, std::abs(got.xmin - expected->xmin),
                      std::abs(got.ymin - expected->ymin), std::abs(got.xmax - expected->xmax),
                      std::abs(got.ymax - expected->ymax)});
  }
  if (worst > 1.0) return {false, "corner hull deviates " + Fmt("%.3f", worst) + " px"};

  const auto inside = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  for (int v = 0; v < kNumVariants; ++v) {
    const auto variant = static_cast<Variant>(v);
    for (int i = 0; i < 10000; ++i) {
      const AugmentOp op = SampleOp(variant, rng);
      std::vector<SingleOp> parts;
      if (const auto single = AsSingleOp(op)) {
        parts.push_back(*single);
      } else {
        const auto& ops = std::get<Combination3>(op).ops();
        parts.assign(ops.begin(), ops.end());
      }
      for (const auto& p : parts) {
        bool ok = true;
        if (const auto* r = std::get_if<Rotation>(&p)) ok = inside(r->angle_deg, -60, 60);
        if (const auto* s = std::get_if<Scaling>(&p)) ok = inside(s->factor, 0.5, 1.5);
        if (const auto* t = std::get_if<Translation>(&p)) ok = inside(t->fraction, 0, 0.3);
        if (const auto* b = std::get_if<Blur>(&p)) ok = inside(b->sigma, 1, 3);
        if (const auto* n = std::get_if<Noise>(&p)) ok = inside(n->sigma, 0.03 * 255, 0.07 * 255);
        if (!ok) return {false, std::string(VariantName(variant)) + " sampled out of range"};
      }
    }
  }
  return {true, "flip exact, worst hull deviation " + Fmt("%.3f", worst) +
                    " px over 100 cases, 7 x 10000 draws in range"};
}

// ---------------------------------------------------------------- AC6

Outcome Ac6() {
  const GroundTruthSet one{{"img", {{"t", {0, 0, 10, 10}}}}};
  const std::vector<Detection> hand = {{"img", "t", 0.60, {0, 0, 10, 10}},
                                       {"img", "t", 0.30, {50, 50, 60, 60}}};
  const auto s = Sweep(hand, one, 0.5);
  if (s.best_threshold_pct != 31 || s.best_f1 != 1.0) {
    return {false, "hand case best " + Fmt("%.0f%%", s.best_threshold_pct) + " F1 " +
                       Fmt("%.4f", s.best_f1)};
  }
  Rng rng(66);
  for (int trial = 0; trial < 200; ++trial) {
    auto [dets, gts] = testing::RandomSet(rng, 1 + rng.Below(8), 8, 6, trial % 2 == 0);
    for (auto& d : dets) d.confidence = std::round(d.confidence * 1000) / 1000;
    const std::size_t n_gt = detail::CountGroundTruths(gts);
    if (n_gt == 0) continue;
    const auto sweep = Sweep(dets, gts, 0.5);
    if (sweep.rows.size() != 101) return {false, "sweep does not cover 0..100%"};
    for (std::size_t k = 0; k < sweep.rows.size(); ++k) {
      const auto& r = sweep.rows[k];
      if (r.threshold_pct != static_cast<double>(k) || r.tp + r.fn != n_gt) {
        return {false, "row " + std::to_string(k) + " breaks TP+FN = |GT|"};
      }
      if (k > 0) {
        const auto& p = sweep.rows[k - 1];
        if (r.tp > p.tp || r.fp > p.fp || r.fn < p.fn) {
          return {false, "counts not monotone at " + std::to_string(k) + "%"};
        }
      }
    }
    EvalConfig at_best;
    at_best.confidence_threshold = sweep.best_threshold_pct / 100.0;
    if (Evaluate(dets, gts, at_best).f1 != sweep.best_f1 ||
        Evaluate(ApplyCalibration(dets, sweep.best_threshold_pct), gts, {}).f1 != sweep.best_f1) {
      return {false, "re-evaluation at the best threshold differs in trial " +
                         std::to_string(trial)};
    }
  }
  return {true, "hand case 31% / F1 1.0; monotone counts and self-consistency on 200 sets"};
}

// ---------------------------------------------------------------- AC7

Outcome Ac7() {
  std::vector<std::string> ids;
  for (int i = 0; i < 23021; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "img%05d", i);
    ids.push_back(buf);
  }
  const auto split = SplitTrainVal(ids, 0.8, 1);
  std::set<std::string> all(split.train.begin(), split.train.end());
  all.insert(split.val.begin(), split.val.end());
  const bool ok = split.train.size() == 18417 && split.val.size() == 4604 && all.size() == 23021;
  return {ok, std::to_string(split.train.size()) + " / " + std::to_string(split.val.size())};
}

// ---------------------------------------------------------------- AC8

int RunCli(const fs::path& cwd, const std::string& args) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" VOCBENCH_CLI "' " + args +
                          " >> cli.log 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Runs the whole pipeline inside `run`, reading the corpus at ../corpus.
std::string RunPipeline(const fs::path& run, int jobs) {
  EnsureDirectory(run);
  const std::string g = "--seed 42 --jobs " + std::to_string(jobs) + " ";
  const std::vector<std::string> first = {
      "subsample --frames ../corpus/frames.csv --interval 3 --out sub",
      "tile --in sub --out tiles --size 300 --min-overlap 0.2",
      "augment --in tiles --out aug --multiplicity 2",
      "split --in aug --out splits --train-fraction 0.8 --group-by-parent --val-originals-only",
  };
  for (const auto& step : first) {
    if (RunCli(run, g + step) != 0) return "'" + step + "' failed";
  }

  // Stand-in detector output and inference timings for the validation tiles.
  const SplitManifest val = ReadManifest(run / "splits/val.csv");
  std::vector<ImageAnnotation> anns;
  for (const auto& item : val.items) anns.push_back(LoadAnnotationFile(run / "splits" / item.xml_path));
  testing::WriteDetectionDir(run / "det", anns, testing::SyntheticDetections(anns, 8));
  Rng rng(9);
  std::string timing = "image_id,duration_ms\n";
  for (const auto& a : anns) timing += a.image_id + "," + Fmt("%.3f", rng.Uniform(12, 20)) + "\n";
  WriteTextFile(run / "timing.csv", timing);

  const std::vector<std::string> second = {
      "evaluate --gt splits/val.csv --det det --model synth --out eval.json --curve-csv curve.csv",
      "calibrate --gt splits/val.csv --det det --model synth --out calib.json --sweep-csv sweep.csv",
      "evaluate --gt splits/val.csv --det det --model synth --threshold-from calib.json "
      "--out eval_cal.json",
      "report --eval synth=eval.json --timing synth=timing.csv --calibration synth=calib.json "
      "--format markdown --out summary.md --calibration-table calibration.md --plots plots",
  };
  for (const auto& step : second) {
    if (RunCli(run, g + step) != 0) return "'" + step + "' failed";
  }
  return "";
}

std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "cli.log") continue;
    files[fs::relative(e.path(), root).generic_string()] = ReadTextFile(e.path());
  }
  return files;
}

Outcome Ac8() {
  TempDir dir("vocbench-acceptance");
  testing::WriteSyntheticCorpus(dir / "corpus", 20, 1280, 720, 2024);
  for (const auto& [name, jobs] : {std::pair{"a", 1}, std::pair{"b", 4}}) {
    const std::string err = RunPipeline(dir / name, jobs);
    if (!err.empty()) {
      return {false, std::string(name) + ": " + err + "\n" + ReadTextFile(dir / name / "cli.log")};
    }
  }
  const auto a = Snapshot(dir / "a");
  const auto b = Snapshot(dir / "b");
  for (const char* must : {"eval.json", "calib.json", "eval_cal.json", "summary.md",
                           "plots/pr_curve.svg", "plots/f1_vs_threshold.svg", "splits/val.csv"}) {
    if (!a.count(must)) return {false, std::string("missing artifact ") + must};
  }
  if (a.size() != b.size()) return {false, "runs produced different file sets"};
  for (const auto& [rel, bytes] : a) {
    const auto it = b.find(rel);
    if (it == b.end()) return {false, rel + " only in the first run"};
    if (it->second != bytes) return {false, rel + " differs between runs"};
  }
  return {true, std::to_string(a.size()) + " artifacts byte-identical across two runs"};
}

// ---------------------------------------------------------------- AC9

Outcome Ac9() {
  Rng rng(99);
  std::size_t checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    auto [dets, gts] = testing::RandomSet(rng, 1 + rng.Below(6), 8, 6, trial % 2 == 0);
    if (detail::CountGroundTruths(gts) == 0) continue;
    const auto full = PrCurve(dets, gts, {});
    const double tau = static_cast<double>(rng.Below(101)) / 100.0;
    EvalConfig cut_config;
    cut_config.confidence_threshold = tau;
    const auto cut = PrCurve(dets, gts, cut_config);
    std::vector<PRPoint> prefix;
    for (const auto& p : full.points) {
      if (p.confidence >= tau) prefix.push_back(p);
    }
    if (cut.points != prefix) {
      return {false, "truncated curve differs from the prefix in trial " + std::to_string(trial)};
    }
    ++checked;
  }
  return {true, std::to_string(checked) + " sets, curve at tau equals the tau=0 prefix"};
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace vocbench

int main() {
  using namespace vocbench;
  const std::vector<Criterion> criteria = {
      {"f1-consistency", 1, Ac1},       {"conservation", 30, Ac2},
      {"ap-oracle", 10, Ac3},           {"tiling", 30, Ac4},
      {"augmentation-geometry", 60, Ac5}, {"calibration", 10, Ac6},
      {"split-counts", 1, Ac7},         {"determinism", 120, Ac8},
      {"truncation", 10, Ac9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit_s) {
      out.pass = false;
      out.detail += "; over time limit";
    }
    failed += !out.pass;
    std::printf("AC%zu %s %s: %s (%.3f s, limit %.0f s)\n", i + 1, out.pass ? "PASS" : "FAIL",
                c.name, out.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
