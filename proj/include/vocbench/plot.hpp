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
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "vocbench/error.hpp"
#include "vocbench/voc_io.hpp"

namespace vocbench {

enum class PlotKind { kPrCurve, kF1VsThreshold, kCountsVsThreshold };

struct PlotSeries {
  std::string name;
  std::vector<std::array<double, 2>> points;  // (x, y)
};

namespace detail {

inline std::string Num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf) == "-0.00" ? "0.00" : buf;
}

// Round number >= v from the 1-2-5 sequence.
inline double NiceCeil(double v) {
  if (v <= 0) return 1;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= v) return m * mag;
  }
  return 10 * mag;
}

}  // namespace detail

// Standalone SVG line chart. Precision/F1 axes span [0, 1]; the count axis
// spans [0, nice(max)]. Series with at most `kMaxMarkers` points also get one
// circle marker per point. Output depends only on the arguments.
inline std::string EmitPlot(PlotKind kind, const std::vector<PlotSeries>& series,
                            const std::string& title = "") {
  constexpr std::size_t kMaxMarkers = 50;
  bool any = false;
  for (const auto& s : series) any = any || !s.points.empty();
  if (!any) Fail(ErrorKind::kUsage, "plot needs at least one non-empty series");

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double width = 720, height = 480;
  const double left = 70, right = 200, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double y_max = 1;
  if (kind == PlotKind::kCountsVsThreshold) {
    double m = 0;
    for (const auto& s : series) {
      for (const auto& p : s.points) m = std::max(m, p[1]);
    }
    y_max = detail::NiceCeil(m);
  }
  const auto sx = [&](double x) { return left + std::clamp(x, 0.0, 1.0) * pw; };
  const auto sy = [&](double y) { return top + ph - std::clamp(y / y_max, 0.0, 1.0) * ph; };

  const char* x_label = kind == PlotKind::kPrCurve ? "Recall" : "Confidence threshold";
  const char* y_label = kind == PlotKind::kPrCurve        ? "Precision"
                        : kind == PlotKind::kF1VsThreshold ? "F1-score"
                                                           : "Count";
  using detail::Num;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + Num(width) + "\" height=\"" +
         Num(height) + "\" viewBox=\"0 0 " + Num(width) + " " + Num(height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + Num(width) + "\" height=\"" + Num(height) +
         "\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += "<text x=\"" + Num(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" " +
           "font-family=\"sans-serif\" font-size=\"16\">" + detail::XmlEscape(title) +
           "</text>\n";
  }
  // axes and ticks
  svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<rect x=\"" + Num(left) + "\" y=\"" + Num(top) + "\" width=\"" + Num(pw) +
         "\" height=\"" + Num(ph) + "\"/>\n";
  svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double t = i / 5.0;
    const double x = sx(t), y = top + ph - t * ph;
    svg += "<line x1=\"" + Num(x) + "\" y1=\"" + Num(top + ph) + "\" x2=\"" + Num(x) +
           "\" y2=\"" + Num(top + ph + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + Num(x) + "\" y=\"" + Num(top + ph + 18) +
           "\" text-anchor=\"middle\">" + Num(t) + "</text>\n";
    svg += "<line x1=\"" + Num(left - 5) + "\" y1=\"" + Num(y) + "\" x2=\"" + Num(left) +
           "\" y2=\"" + Num(y) + "\" stroke=\"black\"/>\n";
    const double yv = t * y_max;
    const std::string label = kind == PlotKind::kCountsVsThreshold
                                  ? std::to_string(static_cast<long long>(std::llround(yv)))
                                  : Num(yv);
    svg += "<text x=\"" + Num(left - 8) + "\" y=\"" + Num(y + 4) +
           "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  svg += "<text x=\"" + Num(left + pw / 2) + "\" y=\"" + Num(height - 15) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + Num(top + ph / 2) + "\" text-anchor=\"middle\" " +
         "font-size=\"13\" transform=\"rotate(-90 18 " + Num(top + ph / 2) + ")\">" + y_label +
         "</text>\n</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string color = kPalette[i % std::size(kPalette)];
    if (s.points.size() >= 2) {
      svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < s.points.size(); ++k) {
        svg += (k ? " " : "") + Num(sx(s.points[k][0])) + "," + Num(sy(s.points[k][1]));
      }
      svg += "\"/>\n";
    }
    if (s.points.size() <= kMaxMarkers) {
      for (const auto& p : s.points) {
        svg += "<circle class=\"marker\" cx=\"" + Num(sx(p[0])) + "\" cy=\"" + Num(sy(p[1])) +
               "\" r=\"3\" fill=\"" + color + "\"/>\n";
      }
    }
    const double ly = top + 14 + 18 * static_cast<double>(i);
    svg += "<line x1=\"" + Num(left + pw + 12) + "\" y1=\"" + Num(ly) + "\" x2=\"" +
           Num(left + pw + 32) + "\" y2=\"" + Num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + Num(left + pw + 38) + "\" y=\"" + Num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::XmlEscape(s.name) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace vocbench
