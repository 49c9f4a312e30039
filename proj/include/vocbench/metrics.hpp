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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "vocbench/annotation.hpp"
#include "vocbench/error.hpp"
#include "vocbench/geometry.hpp"

namespace vocbench {

enum class Interpolation { kAllPoint, kElevenPoint };

struct EvalConfig {
  double iou_threshold = 0.5;
  double confidence_threshold = 0;  // detections below are discarded first
  Interpolation interpolation = Interpolation::kAllPoint;

  void Validate() const {
    if (!(iou_threshold > 0 && iou_threshold <= 1)) {
      Fail(ErrorKind::kRange, "IoU threshold must lie in (0, 1]");
    }
    if (!(confidence_threshold >= 0 && confidence_threshold <= 1)) {
      Fail(ErrorKind::kRange, "confidence threshold must lie in [0, 1]");
    }
  }
};

// Ground truth per image id. Images without objects may be present; their
// detections are all false positives.
using GroundTruthSet = std::map<std::string, std::vector<GroundTruthObject>>;

inline GroundTruthSet GroundTruthFrom(const std::vector<ImageAnnotation>& annotations) {
  GroundTruthSet out;
  for (const auto& a : annotations) {
    auto& objs = out[a.image_id];
    objs.insert(objs.end(), a.objects.begin(), a.objects.end());
  }
  return out;
}

// Order in which detections claim ground truth: higher confidence first, then
// lexicographic box, then image id, then input position.
inline bool ProcessedBefore(const Detection& a, std::size_t ia, const Detection& b,
                            std::size_t ib) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.bbox != b.bbox) return a.bbox < b.bbox;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return ia < ib;
}

enum class MatchFlag { kTruePositive, kFalsePositive };

struct DetectionMatch {
  std::size_t detection = 0;  // index into the input detections
  MatchFlag flag = MatchFlag::kFalsePositive;
  std::optional<std::size_t> ground_truth;  // index into the input ground truth
  double iou = 0;                           // with the claimed ground truth
};

struct MatchOutcome {
  std::vector<DetectionMatch> matches;  // in processing order
  std::vector<bool> gt_matched;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

// Greedy matching for one image and one class. Detections below the
// confidence threshold are dropped; the rest, in processing order, each claim
// the unmatched ground truth of highest IoU (lowest index on ties) when that
// IoU reaches the threshold.
inline MatchOutcome MatchDetections(std::span<const Detection> dets,
                                    std::span<const GroundTruthObject> gts,
                                    const EvalConfig& config) {
  config.Validate();
  for (const auto& d : dets) {
    if (d.image_id != dets.front().image_id) {
      Fail(ErrorKind::kUsage, "MatchDetections given detections from images '" +
                                  dets.front().image_id + "' and '" + d.image_id + "'");
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].confidence >= config.confidence_threshold) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ProcessedBefore(dets[a], a, dets[b], b);
  });

  MatchOutcome out;
  out.gt_matched.assign(gts.size(), false);
  for (const std::size_t i : order) {
    DetectionMatch m{i, MatchFlag::kFalsePositive, std::nullopt, 0};
    double best = -1;
    std::size_t best_gt = 0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (out.gt_matched[g]) continue;
      const double v = Iou(dets[i].bbox, gts[g].bbox);
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best >= config.iou_threshold) {
      out.gt_matched[best_gt] = true;
      m.flag = MatchFlag::kTruePositive;
      m.ground_truth = best_gt;
      m.iou = best;
      ++out.tp;
    } else {
      ++out.fp;
    }
    out.matches.push_back(m);
  }
  out.fn = gts.size() - out.tp;
  if (out.tp + out.fn != gts.size() || out.tp + out.fp != order.size()) {
    Fail(ErrorKind::kConsistency, "match counts violate conservation");
  }
  return out;
}

// All three use 0 for 0/0.
inline double Precision(std::size_t tp, std::size_t fp) {
  return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}
inline double Recall(std::size_t tp, std::size_t fn) {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}
inline double F1(double precision, double recall) {
  return precision + recall == 0 ? 0.0 : 2 * precision * recall / (precision + recall);
}

struct PRPoint {
  double recall = 0;
  double precision = 0;
  double confidence = 0;  // of the detection that produced the point

  friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

struct PRCurve {
  std::vector<PRPoint> points;
  std::size_t num_ground_truths = 0;

  friend bool operator==(const PRCurve&, const PRCurve&) = default;
};

namespace detail {

struct ScoredDetection {
  std::size_t index = 0;  // into the detections passed by the caller
  bool true_positive = false;
};

// Per-image matching over a whole set, returned in global processing order.
// No class filtering: callers pass class-homogeneous inputs.
inline std::vector<ScoredDetection> MatchSet(std::span<const Detection> dets,
                                             const GroundTruthSet& gts,
                                             const EvalConfig& config) {
  std::map<std::string, std::vector<std::size_t>> by_image;
  for (std::size_t i = 0; i < dets.size(); ++i) by_image[dets[i].image_id].push_back(i);
  static const std::vector<GroundTruthObject> kNone;
  std::vector<ScoredDetection> scored;
  std::vector<Detection> image_dets;
  for (const auto& [image_id, indices] : by_image) {
    image_dets.clear();
    for (auto i : indices) image_dets.push_back(dets[i]);
    const auto it = gts.find(image_id);
    const auto& image_gts = it == gts.end() ? kNone : it->second;
    const MatchOutcome m = MatchDetections(image_dets, image_gts, config);
    for (const auto& dm : m.matches) {
      scored.push_back({indices[dm.detection], dm.flag == MatchFlag::kTruePositive});
    }
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    return ProcessedBefore(dets[a.index], a.index, dets[b.index], b.index);
  });
  return scored;
}

inline std::size_t CountGroundTruths(const GroundTruthSet& gts) {
  std::size_t n = 0;
  for (const auto& [_, objs] : gts) n += objs.size();
  return n;
}

}  // namespace detail

// Precision/recall after each detection in global descending-confidence
// order. Recall is relative to all ground truths in `gts`.
inline PRCurve PrCurve(std::span<const Detection> dets, const GroundTruthSet& gts,
                       const EvalConfig& config) {
  PRCurve curve;
  curve.num_ground_truths = detail::CountGroundTruths(gts);
  if (curve.num_ground_truths == 0) {
    Fail(ErrorKind::kUsage, "recall is undefined without ground truth");
  }
  std::size_t tp = 0, fp = 0;
  for (const auto& s : detail::MatchSet(dets, gts, config)) {
    (s.true_positive ? tp : fp)++;
    curve.points.push_back({static_cast<double>(tp) / curve.num_ground_truths,
                            Precision(tp, fp), dets[s.index].confidence});
  }
  return curve;
}

// All-point: sum of recall increments times the precision envelope
// max_{r' >= r_i} p(r'). Eleven-point: mean envelope at r = 0, 0.1, ..., 1.
// An empty curve has AP 0.
inline double AveragePrecision(const PRCurve& curve, Interpolation mode) {
  const auto& pts = curve.points;
  if (pts.empty()) return 0;
  std::vector<double> envelope(pts.size());
  double running = 0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    running = std::max(running, pts[i].precision);
    envelope[i] = running;
  }
  if (mode == Interpolation::kAllPoint) {
    double ap = 0, prev_recall = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ap += (pts[i].recall - prev_recall) * envelope[i];
      prev_recall = pts[i].recall;
    }
    return ap;
  }
  double sum = 0;
  for (int k = 0; k <= 10; ++k) {
    const double r = k / 10.0;
    const auto it = std::find_if(pts.begin(), pts.end(),
                                 [&](const PRPoint& p) { return p.recall >= r; });
    if (it != pts.end()) sum += envelope[static_cast<std::size_t>(it - pts.begin())];
  }
  return sum / 11.0;
}

inline double MeanAveragePrecision(const std::map<std::string, double>& per_class_ap) {
  if (per_class_ap.empty()) Fail(ErrorKind::kUsage, "mAP needs at least one class");
  double sum = 0;
  for (const auto& [_, ap] : per_class_ap) sum += ap;
  return sum / static_cast<double>(per_class_ap.size());
}

struct ThresholdCounts {
  double threshold = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  friend bool operator==(const ThresholdCounts&, const ThresholdCounts&) = default;
};

// Number of equal steps of width `step` covering [0, 1]; `step` must divide 1.
inline std::size_t ThresholdSteps(double step) {
  if (!(step > 0 && step <= 1)) Fail(ErrorKind::kRange, "threshold step must lie in (0, 1]");
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9) {
    Fail(ErrorKind::kUsage, "threshold step must divide 1 evenly");
  }
  return static_cast<std::size_t>(n);
}

// Threshold of sweep row k out of `steps`, as a percentage and as a fraction.
// Integer percentages divide exactly, so row k of a 1% sweep compares
// against the same double as the literal "0.kk".
inline double ThresholdPercentAt(std::size_t k, std::size_t steps) {
  return 100.0 * static_cast<double>(k) / static_cast<double>(steps);
}
inline double ThresholdAt(std::size_t k, std::size_t steps) {
  return ThresholdPercentAt(k, steps) / 100.0;
}

// Distinct labels present in detections or ground truth.
inline std::set<std::string> LabelsOf(std::span<const Detection> dets, const GroundTruthSet& gts) {
  std::set<std::string> labels;
  for (const auto& d : dets) labels.insert(d.label);
  for (const auto& [_, objs] : gts) {
    for (const auto& o : objs) labels.insert(o.label);
  }
  return labels;
}

inline std::vector<Detection> DetectionsOfClass(std::span<const Detection> dets,
                                                const std::string& label) {
  std::vector<Detection> out;
  for (const auto& d : dets) {
    if (d.label == label) out.push_back(d);
  }
  return out;
}

inline GroundTruthSet GroundTruthOfClass(const GroundTruthSet& gts, const std::string& label) {
  GroundTruthSet out;
  for (const auto& [id, objs] : gts) {
    auto& dst = out[id];
    for (const auto& o : objs) {
      if (o.label == label) dst.push_back(o);
    }
  }
  return out;
}

// TP/FP/FN with confidence threshold k / steps for k = 0..steps, classes
// matched separately and pooled. Matching runs once: filtering by confidence
// removes a suffix of the processing order, which leaves earlier matches
// unchanged.
inline std::vector<ThresholdCounts> CountsVsThreshold(std::span<const Detection> dets,
                                                      const GroundTruthSet& gts,
                                                      double iou_threshold,
                                                      std::size_t steps) {
  if (steps == 0) Fail(ErrorKind::kUsage, "at least one threshold step is required");
  EvalConfig config;
  config.iou_threshold = iou_threshold;
  struct Flag {
    double confidence;
    bool tp;
  };
  std::vector<Flag> flags;
  for (const auto& label : LabelsOf(dets, gts)) {
    const auto class_dets = DetectionsOfClass(dets, label);
    for (const auto& s : detail::MatchSet(class_dets, GroundTruthOfClass(gts, label), config)) {
      flags.push_back({class_dets[s.index].confidence, s.true_positive});
    }
  }
  std::sort(flags.begin(), flags.end(),
            [](const Flag& a, const Flag& b) { return a.confidence > b.confidence; });
  const std::size_t total_gt = detail::CountGroundTruths(gts);
  std::size_t tp = 0, fp = 0;
  // Walk thresholds from high to low so each row extends the previous prefix.
  std::vector<ThresholdCounts> reversed;
  std::size_t consumed = 0;
  for (std::size_t k = steps + 1; k-- > 0;) {
    const double tau = ThresholdAt(k, steps);
    while (consumed < flags.size() && flags[consumed].confidence >= tau) {
      (flags[consumed].tp ? tp : fp)++;
      ++consumed;
    }
    reversed.push_back({tau, tp, fp, total_gt - tp});
  }
  return {reversed.rbegin(), reversed.rend()};
}

struct ClassResult {
  double ap = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  PRCurve curve;
};

struct EvalReport {
  EvalConfig config;
  std::map<std::string, ClassResult> per_class;
  double map = 0;  // over classes with ground truth
  // Counts pooled over classes, and the metrics derived from them.
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// Full evaluation: per-class matching, curves and AP; mAP; pooled counts.
// Classes seen only in detections are reported (all false positives) but do
// not enter mAP.
inline EvalReport Evaluate(std::span<const Detection> dets, const GroundTruthSet& gts,
                           const EvalConfig& config) {
  config.Validate();
  if (detail::CountGroundTruths(gts) == 0) {
    Fail(ErrorKind::kUsage, "evaluation needs at least one ground-truth object");
  }
  EvalReport report;
  report.config = config;
  std::map<std::string, double> aps;
  for (const auto& label : LabelsOf(dets, gts)) {
    const auto class_dets = DetectionsOfClass(dets, label);
    const auto class_gts = GroundTruthOfClass(gts, label);
    const std::size_t n_gt = detail::CountGroundTruths(class_gts);
    ClassResult r;
    if (n_gt > 0) {
      r.curve = PrCurve(class_dets, class_gts, config);
      r.ap = AveragePrecision(r.curve, config.interpolation);
      aps[label] = r.ap;
    }
    for (const auto& s : detail::MatchSet(class_dets, class_gts, config)) {
      (s.true_positive ? r.tp : r.fp)++;
    }
    r.fn = n_gt - r.tp;
    r.precision = Precision(r.tp, r.fp);
    r.recall = Recall(r.tp, r.fn);
    r.f1 = F1(r.precision, r.recall);
    report.tp += r.tp;
    report.fp += r.fp;
    report.fn += r.fn;
    report.per_class.emplace(label, std::move(r));
  }
  report.map = MeanAveragePrecision(aps);
  report.precision = Precision(report.tp, report.fp);
  report.recall = Recall(report.tp, report.fn);
  report.f1 = F1(report.precision, report.recall);
  return report;
}

}  // namespace vocbench
