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
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "vocbench/annotation.hpp"
#include "vocbench/error.hpp"
#include "vocbench/fileio.hpp"
#include "vocbench/parallel.hpp"
#include "vocbench/raster.hpp"
#include "vocbench/raster_io.hpp"
#include "vocbench/voc_io.hpp"

namespace vocbench {

// Placement of one square tile inside its parent image.
struct TileSpec {
  std::string parent_id;
  std::uint32_t col = 0;
  std::uint32_t row = 0;
  std::uint32_t x0 = 0;
  std::uint32_t y0 = 0;
  std::uint32_t size = 0;

  std::string id() const {
    return parent_id + "_r" + std::to_string(row) + "_c" + std::to_string(col);
  }
  BBox window() const {
    return {double(x0), double(y0), double(x0) + size, double(y0) + size};
  }

  friend bool operator==(const TileSpec&, const TileSpec&) = default;
};

struct TilePlan {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t size = 0;
  double min_overlap = 0;
  std::vector<std::uint32_t> x_offsets;
  std::vector<std::uint32_t> y_offsets;
  // Largest distance between adjacent offsets; 0 on a single-tile axis.
  std::uint32_t stride_x = 0;
  std::uint32_t stride_y = 0;
  std::vector<TileSpec> tiles;  // row-major
};

// ceil(min_overlap * size), robust to the binary representation of fractions
// such as 0.2.
inline std::uint32_t RequiredOverlapPx(std::uint32_t size, double min_overlap) {
  return static_cast<std::uint32_t>(std::ceil(min_overlap * size - 1e-9));
}

// Offsets along one axis of length `length`. The tile count is the smallest n
// with (n-1) * floor((1-min_overlap) * size) + size >= length, and the surplus
// is spread evenly: offset_i = round(i * (length - size) / (n - 1)).
inline std::vector<std::uint32_t> AxisOffsets(std::uint32_t length, std::uint32_t size,
                                              double min_overlap) {
  if (size == 0) Fail(ErrorKind::kUsage, "tile size must be positive");
  if (size > length) {
    Fail(ErrorKind::kGeometry, "tile size " + std::to_string(size) +
                                   " exceeds image extent " + std::to_string(length));
  }
  if (!(min_overlap >= 0 && min_overlap < 1)) {
    Fail(ErrorKind::kRange, "min_overlap must lie in [0, 1)");
  }
  if (length == size) return {0};
  const std::uint32_t max_stride = size - RequiredOverlapPx(size, min_overlap);
  if (max_stride == 0) {
    Fail(ErrorKind::kUsage, "min_overlap leaves no room to advance a tile of size " +
                                std::to_string(size));
  }
  const std::uint64_t span = length - size;
  const std::uint64_t n = 1 + (span + max_stride - 1) / max_stride;
  std::vector<std::uint32_t> offsets(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    // round half up of i * span / (n - 1), in integers
    offsets[i] = static_cast<std::uint32_t>((2 * i * span + (n - 1)) / (2 * (n - 1)));
  }
  return offsets;
}

inline TilePlan PlanTiles(std::uint32_t width, std::uint32_t height, std::uint32_t size,
                          double min_overlap, const std::string& parent_id = "") {
  if (size > width || size > height) {
    Fail(ErrorKind::kGeometry, "tile size " + std::to_string(size) + " exceeds image " +
                                   std::to_string(width) + "x" + std::to_string(height));
  }
  TilePlan plan;
  plan.width = width;
  plan.height = height;
  plan.size = size;
  plan.min_overlap = min_overlap;
  plan.x_offsets = AxisOffsets(width, size, min_overlap);
  plan.y_offsets = AxisOffsets(height, size, min_overlap);
  const auto max_gap = [](const std::vector<std::uint32_t>& o) {
    std::uint32_t g = 0;
    for (std::size_t i = 1; i < o.size(); ++i) g = std::max(g, o[i] - o[i - 1]);
    return g;
  };
  plan.stride_x = max_gap(plan.x_offsets);
  plan.stride_y = max_gap(plan.y_offsets);
  for (std::uint32_t r = 0; r < plan.y_offsets.size(); ++r) {
    for (std::uint32_t c = 0; c < plan.x_offsets.size(); ++c) {
      plan.tiles.push_back({parent_id, c, r, plan.x_offsets[c], plan.y_offsets[r], size});
    }
  }
  return plan;
}

inline Raster CropTile(const Raster& image, const TileSpec& spec) {
  if (std::uint64_t{spec.x0} + spec.size > image.width ||
      std::uint64_t{spec.y0} + spec.size > image.height) {
    Fail(ErrorKind::kGeometry,
         "tile " + spec.id() + " at (" + std::to_string(spec.x0) + "," +
             std::to_string(spec.y0) + ") size " + std::to_string(spec.size) +
             " exceeds image " + std::to_string(image.width) + "x" +
             std::to_string(image.height));
  }
  Raster out(spec.size, spec.size, image.channels);
  const std::size_t row_bytes = std::size_t{spec.size} * image.channels;
  for (std::uint32_t y = 0; y < spec.size; ++y) {
    std::memcpy(&out.pixels[out.index(0, y)],
                &image.pixels[image.index(spec.x0, spec.y0 + y)], row_bytes);
  }
  return out;
}

// Decides whether a clipped box survives.
struct KeepPolicy {
  double min_visible_fraction = 0.30;
  double min_side_px = 10;

  bool keeps(const BBox& clipped, double reference_area) const {
    return reference_area > 0 && clipped.area() / reference_area >= min_visible_fraction &&
           clipped.width() >= min_side_px && clipped.height() >= min_side_px;
  }
};

// Boxes intersected with the tile window and expressed in tile-local
// coordinates; a box is kept when `keep` accepts its visible part relative to
// its full area.
inline std::vector<GroundTruthObject> RemapBoxes(const std::vector<GroundTruthObject>& objects,
                                                 const TileSpec& spec,
                                                 const KeepPolicy& keep) {
  std::vector<GroundTruthObject> out;
  const BBox window = spec.window();
  for (const auto& obj : objects) {
    const auto inter = Intersect(obj.bbox, window);
    if (!inter || !keep.keeps(*inter, obj.bbox.area())) continue;
    out.push_back({obj.label, inter->translated(-double(spec.x0), -double(spec.y0))});
  }
  return out;
}

struct TiledImage {
  TileSpec spec;
  ImageAnnotation annotation;
};

// Pure part of tile_dataset: the annotation of every tile of `ann`.
inline std::vector<TiledImage> TileAnnotation(const ImageAnnotation& ann,
                                              std::uint32_t size, double min_overlap,
                                              const KeepPolicy& keep,
                                              bool drop_empty) {
  const TilePlan plan = PlanTiles(ann.width, ann.height, size, min_overlap, ann.image_id);
  std::vector<TiledImage> out;
  for (const auto& spec : plan.tiles) {
    ImageAnnotation tile;
    tile.image_id = spec.id();
    tile.filename = tile.image_id + ".png";
    tile.folder = ann.folder;
    tile.width = size;
    tile.height = size;
    tile.depth = ann.depth;
    tile.objects = RemapBoxes(ann.objects, spec, keep);
    if (drop_empty && tile.objects.empty()) continue;
    out.push_back({spec, std::move(tile)});
  }
  return out;
}

struct TileOptions {
  std::uint32_t size = 300;
  double min_overlap = 0.20;
  KeepPolicy keep;
  bool drop_empty = false;
  unsigned jobs = 1;
};

// One row of the tiling manifest.
struct TileRecord {
  std::string tile_id;
  std::string parent_id;
  std::uint32_t x0 = 0;
  std::uint32_t y0 = 0;
  std::uint32_t size = 0;
  std::size_t n_boxes = 0;

  friend bool operator==(const TileRecord&, const TileRecord&) = default;
};

// Image file for `ann` inside `images_dir`: the annotated filename first, then
// the image id with common raster extensions.
inline fs::path FindImageFile(const fs::path& images_dir, const ImageAnnotation& ann) {
  if (!ann.filename.empty() && fs::is_regular_file(images_dir / ann.filename)) {
    return images_dir / ann.filename;
  }
  for (const char* ext : {".png", ".jpg", ".jpeg", ".PNG", ".JPG", ".JPEG"}) {
    const fs::path p = images_dir / (ann.image_id + ext);
    if (fs::is_regular_file(p)) return p;
  }
  Fail(ErrorKind::kIo, "image file for '" + ann.image_id + "' (" +
                           (images_dir / ann.filename).string() + ") not found");
}

inline std::string TileManifestCsv(const std::vector<TileRecord>& records) {
  std::string out = "tile_id,parent_id,x0,y0,size,n_boxes\n";
  for (const auto& r : records) {
    out += r.tile_id + "," + r.parent_id + "," + std::to_string(r.x0) + "," +
           std::to_string(r.y0) + "," + std::to_string(r.size) + "," +
           std::to_string(r.n_boxes) + "\n";
  }
  return out;
}

// Tiles every annotated image, writing `<out>/images/<tile>.png`,
// `<out>/annotations/<tile>.xml` and `<out>/tiles.csv`. Returns the manifest
// rows sorted by tile id.
inline std::vector<TileRecord> TileDataset(const std::vector<ImageAnnotation>& annotations,
                                           const fs::path& images_dir,
                                           const fs::path& out_dir,
                                           const TileOptions& options) {
  EnsureDirectory(out_dir / "images");
  EnsureDirectory(out_dir / "annotations");
  std::vector<std::vector<TileRecord>> per_image(annotations.size());
  ParallelFor(annotations.size(), options.jobs, [&](std::size_t i) {
    const ImageAnnotation& ann = annotations[i];
    const fs::path image_path = FindImageFile(images_dir, ann);
    const Raster image = ReadRaster(image_path);
    if (image.width != ann.width || image.height != ann.height) {
      Fail(ErrorKind::kConsistency,
           "'" + image_path.string() + "' is " + std::to_string(image.width) + "x" +
               std::to_string(image.height) + " but its annotation says " +
               std::to_string(ann.width) + "x" + std::to_string(ann.height));
    }
    for (auto& tiled : TileAnnotation(ann, options.size, options.min_overlap,
                                      options.keep, options.drop_empty)) {
      const std::string id = tiled.annotation.image_id;
      WritePng(out_dir / "images" / (id + ".png"), CropTile(image, tiled.spec));
      WriteTextFile(out_dir / "annotations" / (id + ".xml"),
                    WriteAnnotation(tiled.annotation));
      per_image[i].push_back({id, ann.image_id, tiled.spec.x0, tiled.spec.y0,
                              tiled.spec.size, tiled.annotation.objects.size()});
    }
  });
  std::vector<TileRecord> records;
  for (auto& v : per_image) records.insert(records.end(), v.begin(), v.end());
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.tile_id < b.tile_id; });
  WriteTextFile(out_dir / "tiles.csv", TileManifestCsv(records));
  return records;
}

}  // namespace vocbench
