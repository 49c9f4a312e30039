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

// Independent oracles. Nothing here calls the code paths it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vocbench/annotation.hpp"

namespace vocbench::oracle {

// IoU by counting pixels of integer boxes rasterized on a grid.
inline double PixelIou(const BBox& a, const BBox& b) {
  const int x_lo = static_cast<int>(std::min(a.xmin, b.xmin));
  const int x_hi = static_cast<int>(std::max(a.xmax, b.xmax));
  const int y_lo = static_cast<int>(std::min(a.ymin, b.ymin));
  const int y_hi = static_cast<int>(std::max(a.ymax, b.ymax));
  long inter = 0, uni = 0;
  for (int y = y_lo; y < y_hi; ++y) {
    for (int x = x_lo; x < x_hi; ++x) {
      const double cx = x + 0.5, cy = y + 0.5;
      const bool in_a = cx > a.xmin && cx < a.xmax && cy > a.ymin && cy < a.ymax;
      const bool in_b = cx > b.xmin && cx < b.xmax && cy > b.ymin && cy < b.ymax;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Closed-form IoU written out from the overlap lengths on each axis.
inline double AnalyticIou(const BBox& a, const BBox& b) {
  const double ox = std::max(0.0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
  const double oy = std::max(0.0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
  const double inter = ox * oy;
  if (inter == 0) return 0;
  const double area_a = (a.xmax - a.xmin) * (a.ymax - a.ymin);
  const double area_b = (b.xmax - b.xmin) * (b.ymax - b.ymin);
  return inter / (area_a + area_b - inter);
}

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  friend bool operator==(const Counts&, const Counts&) = default;
};

// The greedy rule taken literally: repeatedly pick the highest-ranked
// unprocessed detection by linear scan; it claims the best still-free ground
// truth if the overlap reaches the threshold.
inline Counts GreedyMatch(const std::vector<Detection>& dets,
                          const std::vector<GroundTruthObject>& gts, double iou_threshold,
                          double confidence_threshold, std::vector<bool>* tp_flags = nullptr) {
  std::vector<bool> done(dets.size(), false);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].confidence < confidence_threshold) done[i] = true;
  }
  if (tp_flags) tp_flags->assign(dets.size(), false);
  std::vector<bool> taken(gts.size(), false);
  Counts c;
  while (true) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (done[i]) continue;
      if (!pick) {
        pick = i;
        continue;
      }
      const auto& a = dets[i];
      const auto& b = dets[*pick];
      const auto ka = std::array{-a.confidence, a.bbox.xmin, a.bbox.ymin, a.bbox.xmax, a.bbox.ymax};
      const auto kb = std::array{-b.confidence, b.bbox.xmin, b.bbox.ymin, b.bbox.xmax, b.bbox.ymax};
      if (ka < kb) pick = i;  // equal keys keep the earlier index
    }
    if (!pick) break;
    done[*pick] = true;
    double best = -1;
    std::optional<std::size_t> best_gt;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = AnalyticIou(dets[*pick].bbox, gts[g].bbox);
      if (v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt && best >= iou_threshold) {
      taken[*best_gt] = true;
      ++c.tp;
      if (tp_flags) (*tp_flags)[*pick] = true;
    } else {
      ++c.fp;
    }
  }
  c.fn = gts.size() - c.tp;
  return c;
}

// Area under the interpolated precision p(r) = max{p_i : r_i >= r},
// integrated piecewise over the recall breakpoints (midpoint evaluation is
// exact for a step function).
inline double IntegratedAp(const std::vector<std::array<double, 2>>& recall_precision) {
  std::set<double> cuts{0.0, 1.0};
  for (const auto& [r, p] : recall_precision) cuts.insert(r);
  const std::vector<double> xs(cuts.begin(), cuts.end());
  double area = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double mid = (xs[i - 1] + xs[i]) / 2;
    double env = 0;
    for (const auto& [r, p] : recall_precision) {
      if (r >= mid) env = std::max(env, p);
    }
    area += (xs[i] - xs[i - 1]) * env;
  }
  return area;
}

// Fewest tiles of size `size` covering [0, length) with every adjacent pair
// overlapping by at least ceil(size * pct / 100) pixels, by advancing each
// tile as far as allowed.
inline std::uint32_t MinimalTileCount(std::uint32_t length, std::uint32_t size,
                                      std::uint32_t pct) {
  const std::uint32_t need = (size * pct + 99) / 100;
  std::uint32_t stride = 0;
  for (std::uint32_t s = size; s > 0; --s) {
    if (size - s >= need) {
      stride = s;
      break;
    }
  }
  std::uint32_t count = 1, reach = size;
  std::uint32_t pos = 0;
  while (reach < length) {
    pos = std::min(pos + stride, length - size);
    reach = pos + size;
    ++count;
  }
  return count;
}

// Canvas pixels whose centres land inside `box` after rotating the canvas by
// `angle_deg` (counter-clockwise on screen, y down) and scaling by `scale`
// about its centre, found by inverse-mapping every output pixel. Returns
// their pixel-edge bounding box clipped to the canvas, or nullopt if none.
// The grid extends one canvas beyond every edge so the hull is taken before
// clipping.
inline std::optional<BBox> RasterizedHull(const BBox& box, double angle_deg, double scale,
                                          int width, int height) {
  const double t = angle_deg * 3.14159265358979323846 / 180.0;
  const double c = std::cos(t), s = std::sin(t);
  const double cx = width / 2.0, cy = height / 2.0;
  std::optional<BBox> hull;
  for (int y = -height; y < 2 * height; ++y) {
    for (int x = -width; x < 2 * width; ++x) {
      const double u = x + 0.5 - cx, v = y + 0.5 - cy;
      const double sx = cx + (c * u - s * v) / scale;
      const double sy = cy + (s * u + c * v) / scale;
      if (sx < box.xmin || sx > box.xmax || sy < box.ymin || sy > box.ymax) continue;
      const BBox px{double(x), double(y), x + 1.0, y + 1.0};
      if (!hull) {
        hull = px;
      } else {
        hull->xmin = std::min(hull->xmin, px.xmin);
        hull->ymin = std::min(hull->ymin, px.ymin);
        hull->xmax = std::max(hull->xmax, px.xmax);
        hull->ymax = std::max(hull->ymax, px.ymax);
      }
    }
  }
  if (!hull) return hull;
  hull->xmin = std::max(hull->xmin, 0.0);
  hull->ymin = std::max(hull->ymin, 0.0);
  hull->xmax = std::min(hull->xmax, double(width));
  hull->ymax = std::min(hull->ymax, double(height));
  if (hull->xmin >= hull->xmax || hull->ymin >= hull->ymax) return std::nullopt;
  return hull;
}

}  // namespace vocbench::oracle
