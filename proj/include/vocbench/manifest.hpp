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
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "vocbench/error.hpp"
#include "vocbench/fileio.hpp"
#include "vocbench/rng.hpp"
#include "vocbench/tiling.hpp"
#include "vocbench/voc_io.hpp"

namespace vocbench {

struct FrameRecord {
  std::string path;
  double timestamp = 0;  // seconds

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

// Keeps the first frame, then each next frame at least `interval` seconds
// after the last kept one.
inline std::vector<FrameRecord> SubsampleFrames(const std::vector<FrameRecord>& frames,
                                                double interval) {
  if (!(interval > 0)) Fail(ErrorKind::kUsage, "subsampling interval must be positive");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].timestamp < frames[i - 1].timestamp) {
      Fail(ErrorKind::kOrdering, "frame " + std::to_string(i) + " ('" + frames[i].path +
                                     "') is earlier than its predecessor");
    }
  }
  // Slack for timestamps such as k / fps that are not exact in binary.
  constexpr double kSlack = 1e-9;
  std::vector<FrameRecord> out;
  for (const auto& f : frames) {
    if (out.empty() || f.timestamp >= out.back().timestamp + interval - kSlack) {
      out.push_back(f);
    }
  }
  return out;
}

inline std::vector<FrameRecord> ParseFramesCsv(std::string_view text) {
  std::vector<FrameRecord> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = detail::Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || (line_no == 1 && line == "path,timestamp")) continue;
    const auto comma = line.rfind(',');
    FrameRecord f;
    if (comma == std::string_view::npos ||
        !detail::ParseDouble(line.substr(comma + 1), f.timestamp)) {
      Fail(ErrorKind::kParse, "frames line " + std::to_string(line_no) +
                                  ": expected 'path,timestamp'");
    }
    f.path = std::string(line.substr(0, comma));
    out.push_back(std::move(f));
  }
  return out;
}

inline std::string FramesCsv(const std::vector<FrameRecord>& frames) {
  std::string out = "path,timestamp\n";
  for (const auto& f : frames) out += f.path + "," + detail::FormatNumber(f.timestamp) + "\n";
  return out;
}

// Source frame of a tile or augmented-tile id
// (`<parent>_r<row>_c<col>[_aug<k>_<variant>]`); other ids map to themselves.
inline std::string ParentIdOf(const std::string& id) {
  static const std::regex pattern(R"(^(.*)_r\d+_c\d+(_aug\d+_[a-z0-9]+)?$)");
  std::smatch m;
  if (std::regex_match(id, m, pattern)) return m[1].str();
  return id;
}

// True for ids produced by augmentation (`<source>_aug<k>_<variant>`).
inline bool IsAugmentedId(const std::string& id) {
  static const std::regex pattern(R"(^.+_aug\d+_[a-z0-9]+$)");
  return std::regex_match(id, pattern);
}

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> warnings;
};

inline std::size_t TrainCount(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5));
}

// Fisher-Yates shuffle under `seed`, then the first round(fraction * N) ids
// train. Both halves are returned sorted.
inline SplitResult SplitTrainVal(std::vector<std::string> ids, double train_fraction,
                                 std::uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1)) {
    Fail(ErrorKind::kRange, "train fraction must lie in (0, 1)");
  }
  SplitResult out;
  if (ids.empty()) {
    out.warnings.push_back("split input is empty; both splits are empty");
    return out;
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    Fail(ErrorKind::kUsage, "split input contains duplicate ids");
  }
  Rng rng(seed);
  rng.Shuffle(ids);
  const std::size_t n_train = TrainCount(ids.size(), train_fraction);
  out.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  return out;
}

// Keeps every id of one parent frame on the same side. Groups are shuffled
// and assigned to train until it reaches round(fraction * N) ids, so the
// proportion is only as exact as the group sizes allow.
inline SplitResult SplitTrainValByParent(const std::vector<std::string>& ids,
                                         double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1)) {
    Fail(ErrorKind::kRange, "train fraction must lie in (0, 1)");
  }
  SplitResult out;
  if (ids.empty()) {
    out.warnings.push_back("split input is empty; both splits are empty");
    return out;
  }
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& id : ids) groups[ParentIdOf(id)].push_back(id);
  std::vector<std::string> keys;
  for (const auto& [k, _] : groups) keys.push_back(k);
  Rng rng(seed);
  rng.Shuffle(keys);
  const std::size_t target = TrainCount(ids.size(), train_fraction);
  for (const auto& k : keys) {
    auto& dst = out.train.size() < target ? out.train : out.val;
    dst.insert(dst.end(), groups[k].begin(), groups[k].end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  return out;
}

struct ManifestItem {
  std::string id;
  std::string image_path;  // relative to the manifest's directory
  std::string xml_path;    // relative to the manifest's directory
  std::size_t n_annotations = 0;

  friend bool operator==(const ManifestItem&, const ManifestItem&) = default;
};

struct SplitManifest {
  std::string name;  // train, val or test
  std::vector<ManifestItem> items;

  std::size_t image_count() const { return items.size(); }
  std::size_t annotation_count() const {
    std::size_t n = 0;
    for (const auto& i : items) n += i.n_annotations;
    return n;
  }

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;
};

inline std::string ManifestCsv(const SplitManifest& split) {
  std::string out = "id,image_path,xml_path,n_annotations\n";
  for (const auto& i : split.items) {
    if (i.id.find(',') != std::string::npos || i.image_path.find(',') != std::string::npos ||
        i.xml_path.find(',') != std::string::npos) {
      Fail(ErrorKind::kUsage, "manifest fields may not contain commas: '" + i.id + "'");
    }
    out += i.id + "," + i.image_path + "," + i.xml_path + "," +
           std::to_string(i.n_annotations) + "\n";
  }
  return out;
}

// `<dir>/<name>.csv`
inline fs::path WriteManifest(const SplitManifest& split, const fs::path& dir) {
  const fs::path path = dir / (split.name + ".csv");
  WriteTextFile(path, ManifestCsv(split));
  return path;
}

// Reads `<name>.csv`. With `verify`, every referenced XML is parsed and its
// object count must equal the recorded n_annotations.
inline SplitManifest ReadManifest(const fs::path& path, bool verify = true) {
  const std::string text = ReadTextFile(path);
  SplitManifest split;
  split.name = path.stem().string();
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string_view line = detail::Trim(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != "id,image_path,xml_path,n_annotations") {
        Fail(ErrorKind::kSchema, path.string() + ": unexpected manifest header");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t s = 0;
    while (true) {
      const auto c = line.find(',', s);
      f.emplace_back(line.substr(s, c == std::string_view::npos ? line.npos : c - s));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    std::uint32_t n = 0;
    if (f.size() != 4 || !detail::ParseU32(f[3], n)) {
      Fail(ErrorKind::kParse, path.string() + " line " + std::to_string(line_no) +
                                  ": expected id,image_path,xml_path,n_annotations");
    }
    split.items.push_back({f[0], f[1], f[2], n});
  }
  if (verify) {
    const fs::path base = path.parent_path();
    for (const auto& item : split.items) {
      const fs::path xml = base / item.xml_path;
      if (!fs::is_regular_file(xml)) {
        Fail(ErrorKind::kConsistency, "manifest item '" + item.id + "' references missing '" +
                                          xml.string() + "'");
      }
      const std::size_t actual = LoadAnnotationFile(xml).objects.size();
      if (actual != item.n_annotations) {
        Fail(ErrorKind::kConsistency, "manifest item '" + item.id + "' records " +
                                          std::to_string(item.n_annotations) +
                                          " annotations but its XML has " +
                                          std::to_string(actual));
      }
    }
  }
  return split;
}

// Manifest for `ids` of a dataset laid out as `<dataset>/images`,
// `<dataset>/annotations`; paths are made relative to `manifest_dir`.
inline SplitManifest BuildManifest(const std::string& name, const std::vector<std::string>& ids,
                                   const fs::path& dataset_dir, const fs::path& manifest_dir) {
  SplitManifest split{name, {}};
  const fs::path base = fs::absolute(manifest_dir).lexically_normal();
  for (const auto& id : ids) {
    const fs::path xml = dataset_dir / "annotations" / (id + ".xml");
    const ImageAnnotation ann = LoadAnnotationFile(xml);
    const fs::path image = FindImageFile(dataset_dir / "images", ann);
    const auto rel = [&](const fs::path& p) {
      return fs::absolute(p).lexically_normal().lexically_relative(base).generic_string();
    };
    split.items.push_back({id, rel(image), rel(xml), ann.objects.size()});
  }
  return split;
}

}  // namespace vocbench
