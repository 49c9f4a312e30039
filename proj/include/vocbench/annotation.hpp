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

#include <cstdint>
#include <string>
#include <vector>

#include "vocbench/error.hpp"
#include "vocbench/geometry.hpp"

namespace vocbench {

struct GroundTruthObject {
  std::string label;
  BBox bbox;

  friend bool operator==(const GroundTruthObject&,
                         const GroundTruthObject&) = default;
};

// One image's ground truth. VOC difficult/truncated/occluded flags are not
// carried: they are dropped at parse time.
struct ImageAnnotation {
  std::string image_id;  // filename stem
  std::string filename;  // as written in <filename>; defaults to <id>.png
  std::string folder;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t depth = 3;
  std::vector<GroundTruthObject> objects;

  friend bool operator==(const ImageAnnotation&,
                         const ImageAnnotation&) = default;
};

struct Detection {
  std::string image_id;
  std::string label;
  double confidence = 0;
  BBox bbox;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Throws kGeometry/kSchema when `ann` breaks a record invariant.
inline void ValidateAnnotation(const ImageAnnotation& ann) {
  if (ann.image_id.empty()) Fail(ErrorKind::kSchema, "annotation has no image id");
  if (ann.width == 0 || ann.height == 0) {
    Fail(ErrorKind::kGeometry, "annotation '" + ann.image_id +
                                   "' has zero width or height");
  }
  for (std::size_t i = 0; i < ann.objects.size(); ++i) {
    const auto& obj = ann.objects[i];
    if (obj.label.empty()) {
      Fail(ErrorKind::kSchema, "object " + std::to_string(i) + " of '" +
                                   ann.image_id + "' has an empty label");
    }
    const BBox& b = obj.bbox;
    if (!b.valid() || b.xmax > ann.width || b.ymax > ann.height) {
      Fail(ErrorKind::kGeometry, "object " + std::to_string(i) + " of '" +
                                     ann.image_id +
                                     "' has an invalid or out-of-image box");
    }
  }
}

inline std::size_t CountObjects(const std::vector<ImageAnnotation>& anns) {
  std::size_t n = 0;
  for (const auto& a : anns) n += a.objects.size();
  return n;
}

}  // namespace vocbench
