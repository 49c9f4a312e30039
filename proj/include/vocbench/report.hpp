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
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vocbench/error.hpp"
#include "vocbench/metrics.hpp"
#include "vocbench/voc_io.hpp"

namespace vocbench {

struct TimingLog {
  std::string model;
  std::vector<double> durations_ms;  // one per image
};

struct TimingStats {
  double mean_ms = 0;
  double median_ms = 0;
  double p95_ms = 0;  // nearest rank
  std::size_t count = 0;
};

inline TimingStats ComputeTimingStats(const TimingLog& log) {
  if (log.durations_ms.empty()) {
    Fail(ErrorKind::kUsage, "timing log for '" + log.model + "' is empty");
  }
  for (double d : log.durations_ms) {
    if (!(d > 0) || !std::isfinite(d)) {
      Fail(ErrorKind::kRange, "timing log for '" + log.model +
                                  "' has a non-positive duration");
    }
  }
  std::vector<double> sorted = log.durations_ms;
  std::sort(sorted.begin(), sorted.end());
  TimingStats s;
  s.count = sorted.size();
  double sum = 0;
  for (double d : sorted) sum += d;
  s.mean_ms = sum / static_cast<double>(s.count);
  const std::size_t mid = s.count / 2;
  s.median_ms = s.count % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(s.count)));
  s.p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

// Accepts `duration_ms` or `image_id,duration_ms` per line; a non-numeric
// first line is taken as a header.
inline TimingLog ParseTimingLog(std::string_view text, const std::string& model) {
  TimingLog log{model, {}};
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = detail::Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const auto field = comma == std::string_view::npos ? line : line.substr(comma + 1);
    double v = 0;
    if (!detail::ParseDouble(field, v)) {
      if (line_no == 1) continue;
      Fail(ErrorKind::kParse, "timing log line " + std::to_string(line_no) +
                                  ": non-numeric duration");
    }
    log.durations_ms.push_back(v);
  }
  return log;
}

// value in [0, 1] as a percentage rounded half up to two decimals: "78.07%".
inline std::string FormatPercent(double fraction) {
  const double cents = std::floor(fraction * 10000.0 + 0.5 + 1e-7);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f%%", cents / 100.0);
  return buf;
}

inline std::string FormatFixed2(double v) {
  const double cents = std::floor(v * 100.0 + 0.5 + 1e-7);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", cents / 100.0);
  return buf;
}

// "40%" for whole percentages, shortest form otherwise. Rounded to 1e-6 %
// first so 0.29 * 100 prints as 29, not 28.999999999999996.
inline std::string FormatThresholdPct(double pct) {
  return detail::FormatNumber(std::round(pct * 1e6) / 1e6) + "%";
}

// One line of the results table; column order is fixed.
struct SummaryRow {
  std::string model;
  double confidence_threshold_pct = 0;
  std::optional<double> mean_inference_ms;
  double map = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

// One line of the calibration table.
struct CalibrationRow {
  std::string model;
  double threshold_pct = 0;
  double f1 = 0;
};

enum class TableFormat { kCsv, kMarkdown };

namespace detail {

inline std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string Table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows,
                         TableFormat format) {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    if (format == TableFormat::kCsv) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out += (i ? "," : "") + CsvField(cells[i]);
      }
    } else {
      out += "|";
      for (const auto& c : cells) out += " " + c + " |";
    }
    out += "\n";
  };
  line(header);
  if (format == TableFormat::kMarkdown) {
    out += "|";
    for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
    out += "\n";
  }
  for (const auto& r : rows) line(r);
  return out;
}

}  // namespace detail

// Model | Confidence >= | Inference Time | mAP | Precision | Recall | F1
inline std::string EmitSummary(const std::vector<SummaryRow>& rows, TableFormat format) {
  const std::string ge = format == TableFormat::kCsv ? ">=" : "≥";
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.model, FormatThresholdPct(r.confidence_threshold_pct),
                     r.mean_inference_ms ? FormatFixed2(*r.mean_inference_ms) + " ms" : "n/a",
                     FormatPercent(r.map), FormatPercent(r.precision),
                     FormatPercent(r.recall), FormatPercent(r.f1)});
  }
  return detail::Table({"Model", "Confidence " + ge, "Inference Time", "mAP", "Precision",
                        "Recall", "F1"},
                       cells, format);
}

// Model | Confidence >= | F1-Score
inline std::string EmitCalibrationTable(const std::vector<CalibrationRow>& rows,
                                        TableFormat format) {
  const std::string ge = format == TableFormat::kCsv ? ">=" : "≥";
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({r.model, FormatThresholdPct(r.threshold_pct), FormatPercent(r.f1)});
  }
  return detail::Table({"Model", "Confidence " + ge, "F1-Score"}, cells, format);
}

inline std::string_view InterpolationName(Interpolation mode) {
  return mode == Interpolation::kAllPoint ? "all-point" : "11-point";
}

inline Interpolation InterpolationFromName(std::string_view name) {
  if (name == "all-point") return Interpolation::kAllPoint;
  if (name == "11-point") return Interpolation::kElevenPoint;
  Fail(ErrorKind::kUsage, "unknown interpolation '" + std::string(name) + "'");
}

namespace detail {

inline void PutCurve(nlohmann::json& j, const PRCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  nlohmann::json confidence = nlohmann::json::array();
  for (const auto& p : curve.points) {
    points.push_back({p.recall, p.precision});
    confidence.push_back(p.confidence);
  }
  j["curve"] = std::move(points);
  j["curve_confidence"] = std::move(confidence);
}

inline PRCurve GetCurve(const nlohmann::json& j) {
  PRCurve curve;
  if (!j.contains("curve")) return curve;
  const auto& pts = j.at("curve");
  const auto* conf = j.contains("curve_confidence") ? &j.at("curve_confidence") : nullptr;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    curve.points.push_back({pts[i].at(0).get<double>(), pts[i].at(1).get<double>(),
                            conf ? conf->at(i).get<double>() : 0.0});
  }
  return curve;
}

}  // namespace detail

// {config, per_class: {label: {ap, tp, fp, fn, precision, recall, f1, curve}},
//  map, total, curve}. The top-level curve is present for single-class sets.
inline nlohmann::json ReportJson(const EvalReport& report, const std::string& model = "") {
  nlohmann::json j;
  if (!model.empty()) j["model"] = model;
  j["config"] = {{"iou_threshold", report.config.iou_threshold},
                 {"confidence_threshold", report.config.confidence_threshold},
                 {"interpolation", InterpolationName(report.config.interpolation)}};
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [label, r] : report.per_class) {
    nlohmann::json c = {{"ap", r.ap},         {"tp", r.tp},         {"fp", r.fp},
                        {"fn", r.fn},         {"precision", r.precision},
                        {"recall", r.recall}, {"f1", r.f1}};
    detail::PutCurve(c, r.curve);
    per_class[label] = std::move(c);
  }
  j["per_class"] = std::move(per_class);
  j["map"] = report.map;
  j["total"] = {{"tp", report.tp},
                {"fp", report.fp},
                {"fn", report.fn},
                {"precision", report.precision},
                {"recall", report.recall},
                {"f1", report.f1}};
  if (report.per_class.size() == 1) detail::PutCurve(j, report.per_class.begin()->second.curve);
  return j;
}

inline EvalReport ReportFromJson(const nlohmann::json& j) {
  try {
    EvalReport r;
    const auto& cfg = j.at("config");
    r.config.iou_threshold = cfg.at("iou_threshold").get<double>();
    r.config.confidence_threshold = cfg.at("confidence_threshold").get<double>();
    r.config.interpolation = InterpolationFromName(cfg.at("interpolation").get<std::string>());
    for (const auto& [label, c] : j.at("per_class").items()) {
      ClassResult cr;
      cr.ap = c.at("ap").get<double>();
      cr.tp = c.at("tp").get<std::size_t>();
      cr.fp = c.at("fp").get<std::size_t>();
      cr.fn = c.at("fn").get<std::size_t>();
      cr.precision = c.at("precision").get<double>();
      cr.recall = c.at("recall").get<double>();
      cr.f1 = c.at("f1").get<double>();
      cr.curve = detail::GetCurve(c);
      cr.curve.num_ground_truths = cr.tp + cr.fn;
      r.per_class.emplace(label, std::move(cr));
    }
    r.map = j.at("map").get<double>();
    const auto& t = j.at("total");
    r.tp = t.at("tp").get<std::size_t>();
    r.fp = t.at("fp").get<std::size_t>();
    r.fn = t.at("fn").get<std::size_t>();
    r.precision = t.at("precision").get<double>();
    r.recall = t.at("recall").get<double>();
    r.f1 = t.at("f1").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kSchema, std::string("evaluation report JSON: ") + e.what());
  }
}

inline SummaryRow SummaryFrom(const std::string& model, const EvalReport& report,
                              std::optional<double> mean_inference_ms) {
  return {model,        report.config.confidence_threshold * 100.0,
          mean_inference_ms, report.map,
          report.precision, report.recall,
          report.f1};
}

inline std::string PrCurveCsv(const PRCurve& curve) {
  std::string out = "recall,precision,confidence\n";
  for (const auto& p : curve.points) {
    out += detail::FormatNumber(p.recall) + "," + detail::FormatNumber(p.precision) + "," +
           detail::FormatNumber(p.confidence) + "\n";
  }
  return out;
}

// Points at or above `threshold` confidence: the curve the calibrated
// detector would produce.
inline PRCurve TruncateCurve(const PRCurve& curve, double threshold) {
  PRCurve out;
  out.num_ground_truths = curve.num_ground_truths;
  for (const auto& p : curve.points) {
    if (p.confidence >= threshold) out.points.push_back(p);
  }
  return out;
}

}  // namespace vocbench
