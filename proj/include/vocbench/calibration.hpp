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

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "vocbench/annotation.hpp"
#include "vocbench/error.hpp"
#include "vocbench/metrics.hpp"
#include "vocbench/voc_io.hpp"

namespace vocbench {

struct SweepRow {
  double threshold_pct = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ascending threshold, covering 0..100 %
  double best_threshold_pct = 0;
  double best_f1 = 0;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// F1 at every threshold k/steps (a detection passes when its confidence is
// >= the threshold). The best threshold is the smallest one attaining the
// maximum F1.
inline SweepResult Sweep(std::span<const Detection> dets, const GroundTruthSet& gts,
                         double iou_threshold, std::size_t steps = 100) {
  std::size_t n_gt = 0;
  for (const auto& [_, objs] : gts) n_gt += objs.size();
  if (n_gt == 0) Fail(ErrorKind::kUsage, "calibration needs at least one ground-truth object");

  SweepResult result;
  const auto counts = CountsVsThreshold(dets, gts, iou_threshold, steps);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto& c = counts[k];
    SweepRow row{ThresholdPercentAt(k, steps), c.tp, c.fp, c.fn, Precision(c.tp, c.fp),
                 Recall(c.tp, c.fn), 0};
    row.f1 = F1(row.precision, row.recall);
    if (k == 0 || row.f1 > result.best_f1) {
      result.best_f1 = row.f1;
      result.best_threshold_pct = row.threshold_pct;
    }
    result.rows.push_back(row);
  }
  return result;
}

// Detections with confidence >= threshold_pct / 100.
inline std::vector<Detection> ApplyCalibration(std::span<const Detection> dets,
                                               double threshold_pct) {
  const double tau = threshold_pct / 100.0;
  std::vector<Detection> out;
  for (const auto& d : dets) {
    if (d.confidence >= tau) out.push_back(d);
  }
  return out;
}

inline std::string SweepCsv(const SweepResult& sweep) {
  std::string out = "threshold_pct,tp,fp,fn,precision,recall,f1\n";
  for (const auto& r : sweep.rows) {
    out += detail::FormatNumber(r.threshold_pct) + "," + std::to_string(r.tp) + "," +
           std::to_string(r.fp) + "," + std::to_string(r.fn) + "," +
           detail::FormatNumber(r.precision) + "," + detail::FormatNumber(r.recall) + "," +
           detail::FormatNumber(r.f1) + "\n";
  }
  return out;
}

inline nlohmann::json CalibrationJson(const SweepResult& sweep, double iou_threshold) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : sweep.rows) {
    rows.push_back({{"threshold_pct", r.threshold_pct},
                    {"tp", r.tp},
                    {"fp", r.fp},
                    {"fn", r.fn},
                    {"precision", r.precision},
                    {"recall", r.recall},
                    {"f1", r.f1}});
  }
  return {{"best_threshold_pct", sweep.best_threshold_pct},
          {"best_f1", sweep.best_f1},
          {"iou_threshold", iou_threshold},
          {"rows", std::move(rows)}};
}

inline SweepResult SweepFromJson(const nlohmann::json& j) {
  try {
    SweepResult s;
    s.best_threshold_pct = j.at("best_threshold_pct").get<double>();
    s.best_f1 = j.at("best_f1").get<double>();
    if (j.contains("rows")) {
      for (const auto& r : j.at("rows")) {
        s.rows.push_back({r.at("threshold_pct").get<double>(), r.at("tp").get<std::size_t>(),
                          r.at("fp").get<std::size_t>(), r.at("fn").get<std::size_t>(),
                          r.at("precision").get<double>(), r.at("recall").get<double>(),
                          r.at("f1").get<double>()});
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kSchema, std::string("calibration JSON: ") + e.what());
  }
}

}  // namespace vocbench
