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
#include <optional>
#include <ostream>
#include <tuple>

namespace vocbench {

// Axis-aligned box in pixel coordinates, 0-based and half-open:
// [xmin, xmax) x [ymin, ymax). Width is exactly xmax - xmin.
struct BBox {
  double xmin = 0;
  double ymin = 0;
  double xmax = 0;
  double ymax = 0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }

  // Strictly positive area with finite, non-negative coordinates.
  bool valid() const {
    return std::isfinite(xmin) && std::isfinite(ymin) && std::isfinite(xmax) &&
           std::isfinite(ymax) && xmin >= 0 && ymin >= 0 && xmin < xmax &&
           ymin < ymax;
  }

  BBox translated(double dx, double dy) const {
    return {xmin + dx, ymin + dy, xmax + dx, ymax + dy};
  }

  friend bool operator==(const BBox&, const BBox&) = default;

  friend bool operator<(const BBox& a, const BBox& b) {
    return std::tie(a.xmin, a.ymin, a.xmax, a.ymax) <
           std::tie(b.xmin, b.ymin, b.xmax, b.ymax);
  }

  friend std::ostream& operator<<(std::ostream& os, const BBox& b) {
    return os << "BBox(" << b.xmin << "," << b.ymin << "," << b.xmax << ","
              << b.ymax << ")";
  }
};

// Overlap of two boxes; nullopt when they do not share positive area.
inline std::optional<BBox> Intersect(const BBox& a, const BBox& b) {
  BBox out{std::max(a.xmin, b.xmin), std::max(a.ymin, b.ymin),
           std::min(a.xmax, b.xmax), std::min(a.ymax, b.ymax)};
  if (out.xmin >= out.xmax || out.ymin >= out.ymax) return std::nullopt;
  return out;
}

inline double IntersectionArea(const BBox& a, const BBox& b) {
  const double w = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double h = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

// Intersection over union in [0, 1]; 0 for disjoint boxes.
inline double Iou(const BBox& a, const BBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter <= 0) return 0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0;
}

}  // namespace vocbench
