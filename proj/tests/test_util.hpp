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

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "vocbench/vocbench.hpp"

namespace vocbench::testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vocbench") {
    std::string pattern = (fs::temp_directory_path() / (tag + "-XXXXXX")).string();
    if (!mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline BBox RandomBox(Rng& rng, double extent, double min_side = 2) {
  const double x0 = std::floor(rng.Uniform(0, extent - min_side));
  const double y0 = std::floor(rng.Uniform(0, extent - min_side));
  const double w = std::floor(rng.Uniform(min_side, std::max(min_side + 1, extent - x0)));
  const double h = std::floor(rng.Uniform(min_side, std::max(min_side + 1, extent - y0)));
  return {x0, y0, std::min(extent, x0 + w), std::min(extent, y0 + h)};
}

// A box near `b`, so IoUs spread over the whole [0, 1] range.
inline BBox Jitter(Rng& rng, const BBox& b, double amount, double extent) {
  BBox out{b.xmin + std::round(rng.Uniform(-amount, amount)),
           b.ymin + std::round(rng.Uniform(-amount, amount)),
           b.xmax + std::round(rng.Uniform(-amount, amount)),
           b.ymax + std::round(rng.Uniform(-amount, amount))};
  out.xmin = std::clamp(out.xmin, 0.0, extent - 1);
  out.ymin = std::clamp(out.ymin, 0.0, extent - 1);
  out.xmax = std::clamp(out.xmax, out.xmin + 1, extent);
  out.ymax = std::clamp(out.ymax, out.ymin + 1, extent);
  return out;
}

struct Scene {
  std::vector<Detection> dets;
  std::vector<GroundTruthObject> gts;
};

// One image, one class, up to `max_dets` / `max_gts` objects. Confidences are
// quantized to tenths so ties occur.
inline Scene RandomScene(Rng& rng, std::size_t max_dets, std::size_t max_gts,
                         const std::string& image_id = "img") {
  Scene s;
  const double extent = 100;
  const std::size_t n_gt = rng.Below(max_gts + 1);
  const std::size_t n_det = rng.Below(max_dets + 1);
  for (std::size_t i = 0; i < n_gt; ++i) s.gts.push_back({"tomato", RandomBox(rng, extent, 8)});
  for (std::size_t i = 0; i < n_det; ++i) {
    Detection d;
    d.image_id = image_id;
    d.label = "tomato";
    d.confidence = std::round(rng.Uniform(0, 1) * 10) / 10;
    d.bbox = (!s.gts.empty() && rng.Uniform01() < 0.7)
                 ? Jitter(rng, s.gts[rng.Below(s.gts.size())].bbox, 12, extent)
                 : RandomBox(rng, extent, 4);
    s.dets.push_back(d);
  }
  return s;
}

// Several images pooled into one evaluation set. Confidences are continuous
// unless `quantize` is set.
inline std::pair<std::vector<Detection>, GroundTruthSet> RandomSet(Rng& rng, std::size_t images,
                                                                   std::size_t max_dets,
                                                                   std::size_t max_gts,
                                                                   bool quantize = false) {
  std::vector<Detection> dets;
  GroundTruthSet gts;
  for (std::size_t i = 0; i < images; ++i) {
    const std::string id = "img" + std::to_string(i);
    Scene s = RandomScene(rng, max_dets, max_gts, id);
    for (auto& d : s.dets) {
      if (!quantize) d.confidence = rng.Uniform01();
      dets.push_back(d);
    }
    gts[id] = s.gts;
  }
  return {dets, gts};
}

// Smooth background with red discs ("tomatoes"); returns the annotation.
inline ImageAnnotation SyntheticFrame(const std::string& id, std::uint32_t w, std::uint32_t h,
                                      std::uint64_t seed, Raster* image) {
  Rng rng(seed);
  *image = Raster(w, h, 3);
  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t x = 0; x < w; ++x) {
      image->at(x, y, 0) = static_cast<std::uint8_t>(30 + (x * 60) / w);
      image->at(x, y, 1) = static_cast<std::uint8_t>(90 + (y * 80) / h);
      image->at(x, y, 2) = static_cast<std::uint8_t>(40);
    }
  }
  ImageAnnotation ann;
  ann.image_id = id;
  ann.filename = id + ".png";
  ann.folder = "frames";
  ann.width = w;
  ann.height = h;
  const int n = 3 + static_cast<int>(rng.Below(6));
  for (int i = 0; i < n; ++i) {
    const double r_hi = std::min(40.0, std::min(w, h) / 3.0);
    const double r = std::floor(rng.Uniform(std::min(15.0, r_hi / 2), r_hi));
    const double cx = std::floor(rng.Uniform(r, w - r));
    const double cy = std::floor(rng.Uniform(r, h - r));
    for (int y = static_cast<int>(cy - r); y < static_cast<int>(cy + r); ++y) {
      for (int x = static_cast<int>(cx - r); x < static_cast<int>(cx + r); ++x) {
        const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
        if (dx * dx + dy * dy <= r * r) {
          image->at(x, y, 0) = 200;
          image->at(x, y, 1) = 30;
          image->at(x, y, 2) = 30;
        }
      }
    }
    ann.objects.push_back({"tomato", {cx - r, cy - r, cx + r, cy + r}});
  }
  return ann;
}

// `<dir>/images/*.png`, `<dir>/annotations/*.xml` and `<dir>/frames.csv`
// with one frame per `frame_interval` seconds.
inline std::vector<ImageAnnotation> WriteSyntheticCorpus(const fs::path& dir, std::size_t frames,
                                                         std::uint32_t w, std::uint32_t h,
                                                         std::uint64_t seed,
                                                         double frame_interval = 1.5) {
  std::vector<ImageAnnotation> anns;
  std::vector<FrameRecord> records;
  for (std::size_t i = 0; i < frames; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame%04zu", i);
    Raster image;
    anns.push_back(SyntheticFrame(name, w, h, DeriveSeed(seed, i), &image));
    WritePng(dir / "images" / (std::string(name) + ".png"), image);
    WriteTextFile(dir / "annotations" / (std::string(name) + ".xml"),
                  WriteAnnotation(anns.back()));
    records.push_back({"images/" + std::string(name) + ".png", i * frame_interval});
  }
  WriteTextFile(dir / "frames.csv", FramesCsv(records));
  return anns;
}

// Noisy detector: most objects found with a jittered box, some missed, plus
// spurious low-confidence boxes.
inline std::vector<Detection> SyntheticDetections(const std::vector<ImageAnnotation>& anns,
                                                  std::uint64_t seed) {
  std::vector<Detection> out;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    Rng rng(DeriveSeed(seed, i));
    const auto& a = anns[i];
    const double extent = std::min(a.width, a.height);
    for (const auto& o : a.objects) {
      if (rng.Uniform01() < 0.15) continue;
      Detection d{a.image_id, o.label, std::round(rng.Uniform(0.3, 1.0) * 1000) / 1000,
                  Jitter(rng, o.bbox, 4, extent)};
      out.push_back(d);
    }
    const int spurious = static_cast<int>(rng.Below(3));
    for (int k = 0; k < spurious; ++k) {
      out.push_back({a.image_id, "tomato", std::round(rng.Uniform(0.0, 0.6) * 1000) / 1000,
                     RandomBox(rng, extent, 10)});
    }
  }
  return out;
}

inline void WriteDetectionDir(const fs::path& dir, const std::vector<ImageAnnotation>& anns,
                              const std::vector<Detection>& dets) {
  EnsureDirectory(dir);
  for (const auto& a : anns) {
    std::vector<Detection> mine;
    for (const auto& d : dets) {
      if (d.image_id == a.image_id) mine.push_back(d);
    }
    WriteTextFile(dir / (a.image_id + ".txt"), WriteDetections(mine));
  }
}

}  // namespace vocbench::testing
