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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "vocbench/annotation.hpp"
#include "vocbench/error.hpp"
#include "vocbench/fileio.hpp"

namespace vocbench {

namespace detail {

inline std::string_view Trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool ParseDouble(std::string_view s, double& out) {
  s = Trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool ParseU32(std::string_view s, std::uint32_t& out) {
  s = Trim(s);
  // Some exporters write sizes as "300.0".
  double d = 0;
  if (!ParseDouble(s, d) || d < 0 || d > 4294967295.0 || d != std::floor(d)) {
    return false;
  }
  out = static_cast<std::uint32_t>(d);
  return true;
}

// Shortest fixed-notation text that parses back to exactly `v`.
inline std::string FormatNumber(double v) {
  if (v == 0) v = 0;  // no "-0"
  char buf[512];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  if (ec != std::errc()) Fail(ErrorKind::kRange, "number not representable");
  return std::string(buf, ptr);
}

inline bool IsPlainDecimal(std::string_view s) {
  if (s.empty()) return false;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) return false;
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
    } else {
      return false;
    }
  }
  return seen_digit;
}

// Adds `delta` (+1 or -1) to the integer part of a plain non-negative
// decimal string. Exact, so the 1-based <-> 0-based conversion never loses
// fractional digits. Requires integer part >= 1 when delta is -1.
inline std::string ShiftIntegerPart(std::string_view s, int delta) {
  const auto dot = s.find('.');
  std::string integer(s.substr(0, dot));
  const std::string fraction(dot == std::string_view::npos ? "" : s.substr(dot));
  if (integer.empty()) integer = "0";
  int i = static_cast<int>(integer.size()) - 1;
  if (delta > 0) {
    while (i >= 0 && integer[i] == '9') integer[i--] = '0';
    if (i < 0) {
      integer.insert(integer.begin(), '1');
    } else {
      ++integer[i];
    }
  } else {
    while (i >= 0 && integer[i] == '0') integer[i--] = '9';
    --integer[i];
    const auto nz = integer.find_first_not_of('0');
    integer = nz == std::string::npos ? "0" : integer.substr(nz);
  }
  return integer + fraction;
}

// VOC pixel index (1-based) -> internal coordinate (0-based), exact for plain
// decimals.
inline bool ParseVocMinCoordinate(std::string_view text, double& out) {
  text = Trim(text);
  if (IsPlainDecimal(text)) {
    double v = 0;
    if (!ParseDouble(text, v)) return false;
    if (v >= 1) return ParseDouble(ShiftIntegerPart(text, -1), out);
    out = v - 1;
    return true;
  }
  double v = 0;
  if (!ParseDouble(text, v)) return false;
  out = v - 1;
  return true;
}

inline std::string FormatVocMinCoordinate(double v) {
  return ShiftIntegerPart(FormatNumber(v), +1);
}

inline std::string XmlEscape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string StemOf(std::string_view filename) {
  return fs::path(std::string(filename)).stem().string();
}

}  // namespace detail

// Parses one Pascal VOC XML document. Pixel coordinates are converted from
// VOC's 1-based inclusive convention to 0-based half-open: xmin -= 1, xmax
// unchanged. Minimum coordinates in [-1, 0) and maximum coordinates within
// one pixel past the image edge (0-based exporters) are clamped to the image.
inline ImageAnnotation ParseAnnotation(std::string_view xml_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml_text)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    Fail(ErrorKind::kParse, "malformed XML at line " + std::to_string(e.line()) +
                                ": " + e.message());
  }
  const auto root = tree.get_child_optional("annotation");
  if (!root) Fail(ErrorKind::kSchema, "missing <annotation> root element");

  ImageAnnotation ann;
  ann.folder = root->get<std::string>("folder", "");
  ann.filename = root->get<std::string>("filename", "");
  ann.image_id = detail::StemOf(ann.filename);
  if (ann.image_id.empty()) Fail(ErrorKind::kSchema, "missing <filename>");

  const auto size = root->get_child_optional("size");
  if (!size) Fail(ErrorKind::kSchema, "missing <size>");
  const auto read_dim = [&](const char* key, bool required,
                            std::uint32_t fallback) -> std::uint32_t {
    const auto node = size->get_optional<std::string>(key);
    if (!node) {
      if (required) Fail(ErrorKind::kSchema, std::string("missing <size>/<") + key + ">");
      return fallback;
    }
    std::uint32_t v = 0;
    if (!detail::ParseU32(*node, v)) {
      Fail(ErrorKind::kParse, std::string("<size>/<") + key +
                                  "> is not a non-negative integer: '" + *node + "'");
    }
    return v;
  };
  ann.width = read_dim("width", true, 0);
  ann.height = read_dim("height", true, 0);
  ann.depth = read_dim("depth", false, 3);
  if (ann.width == 0 || ann.height == 0) {
    Fail(ErrorKind::kGeometry, "image size must be positive");
  }

  std::size_t index = 0;
  for (const auto& [key, node] : *root) {
    if (key != "object") continue;
    const std::string where = "object " + std::to_string(index);
    GroundTruthObject obj;
    obj.label = std::string(detail::Trim(node.get<std::string>("name", "")));
    if (obj.label.empty()) Fail(ErrorKind::kSchema, where + " has no <name>");
    const auto box = node.get_child_optional("bndbox");
    if (!box) Fail(ErrorKind::kSchema, where + " has no <bndbox>");
    const auto field = [&](const char* k) -> std::string {
      const auto v = box->get_optional<std::string>(k);
      if (!v) Fail(ErrorKind::kSchema, where + " <bndbox> lacks <" + k + ">");
      return *v;
    };
    const std::string sxmin = field("xmin"), symin = field("ymin");
    const std::string sxmax = field("xmax"), symax = field("ymax");
    BBox& b = obj.bbox;
    if (!detail::ParseVocMinCoordinate(sxmin, b.xmin) ||
        !detail::ParseVocMinCoordinate(symin, b.ymin) ||
        !detail::ParseDouble(sxmax, b.xmax) || !detail::ParseDouble(symax, b.ymax)) {
      Fail(ErrorKind::kParse, where + " has a non-numeric coordinate");
    }
    if (b.xmin < 0 && b.xmin >= -1) b.xmin = 0;
    if (b.ymin < 0 && b.ymin >= -1) b.ymin = 0;
    if (b.xmax > ann.width && b.xmax <= ann.width + 1.0) b.xmax = ann.width;
    if (b.ymax > ann.height && b.ymax <= ann.height + 1.0) b.ymax = ann.height;
    if (!b.valid() || b.xmax > ann.width || b.ymax > ann.height) {
      std::ostringstream msg;
      msg << where << " has a degenerate or out-of-image box " << b;
      Fail(ErrorKind::kGeometry, msg.str());
    }
    ann.objects.push_back(std::move(obj));
    ++index;
  }
  return ann;
}

// Inverse of ParseAnnotation: ParseAnnotation(WriteAnnotation(a)) == a for
// every valid `a` whose filename is set.
inline std::string WriteAnnotation(const ImageAnnotation& ann) {
  try {
    ValidateAnnotation(ann);
  } catch (const Error& e) {
    Fail(e.kind(), "refusing to serialize: " + e.message());
  }
  using detail::FormatNumber;
  using detail::XmlEscape;
  const std::string filename =
      ann.filename.empty() ? ann.image_id + ".png" : ann.filename;
  std::ostringstream out;
  out << "<annotation>\n";
  out << "\t<folder>" << XmlEscape(ann.folder) << "</folder>\n";
  out << "\t<filename>" << XmlEscape(filename) << "</filename>\n";
  out << "\t<size>\n";
  out << "\t\t<width>" << ann.width << "</width>\n";
  out << "\t\t<height>" << ann.height << "</height>\n";
  out << "\t\t<depth>" << ann.depth << "</depth>\n";
  out << "\t</size>\n";
  for (const auto& obj : ann.objects) {
    out << "\t<object>\n";
    out << "\t\t<name>" << XmlEscape(obj.label) << "</name>\n";
    out << "\t\t<bndbox>\n";
    out << "\t\t\t<xmin>" << detail::FormatVocMinCoordinate(obj.bbox.xmin) << "</xmin>\n";
    out << "\t\t\t<ymin>" << detail::FormatVocMinCoordinate(obj.bbox.ymin) << "</ymin>\n";
    out << "\t\t\t<xmax>" << FormatNumber(obj.bbox.xmax) << "</xmax>\n";
    out << "\t\t\t<ymax>" << FormatNumber(obj.bbox.ymax) << "</ymax>\n";
    out << "\t\t</bndbox>\n";
    out << "\t</object>\n";
  }
  out << "</annotation>\n";
  return out.str();
}

// One detection per line: `<label> <confidence> <xmin> <ymin> <xmax> <ymax>`,
// coordinates already 0-based half-open. Blank lines are skipped.
inline std::vector<Detection> ParseDetections(std::string_view text,
                                              const std::string& image_id) {
  std::vector<Detection> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = detail::Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) fields.push_back(line.substr(i, j - i));
      i = j;
    }
    const std::string where = image_id + " line " + std::to_string(line_no);
    if (fields.size() != 6) {
      Fail(ErrorKind::kParse, where + ": expected 6 fields, got " +
                                  std::to_string(fields.size()));
    }
    Detection det;
    det.image_id = image_id;
    det.label = std::string(fields[0]);
    double v[5];
    for (int k = 0; k < 5; ++k) {
      if (!detail::ParseDouble(fields[k + 1], v[k])) {
        Fail(ErrorKind::kParse, where + ": non-numeric field '" +
                                    std::string(fields[k + 1]) + "'");
      }
    }
    det.confidence = v[0];
    if (det.confidence < 0 || det.confidence > 1) {
      Fail(ErrorKind::kRange, where + ": confidence " + std::string(fields[1]) +
                                  " outside [0,1]");
    }
    det.bbox = {v[1], v[2], v[3], v[4]};
    if (!det.bbox.valid()) Fail(ErrorKind::kGeometry, where + ": invalid box");
    out.push_back(std::move(det));
  }
  return out;
}

inline std::string WriteDetections(const std::vector<Detection>& dets) {
  using detail::FormatNumber;
  std::string out;
  for (const auto& d : dets) {
    out += d.label + " " + FormatNumber(d.confidence) + " " +
           FormatNumber(d.bbox.xmin) + " " + FormatNumber(d.bbox.ymin) + " " +
           FormatNumber(d.bbox.xmax) + " " + FormatNumber(d.bbox.ymax) + "\n";
  }
  return out;
}

inline ImageAnnotation LoadAnnotationFile(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return ParseAnnotation(text);
  } catch (const Error& e) {
    Fail(e.kind(), path.string() + ": " + e.message());
  }
}

// Every *.xml in `dir`, sorted by image id.
inline std::vector<ImageAnnotation> LoadAnnotationDir(const fs::path& dir) {
  std::vector<ImageAnnotation> out;
  for (const auto& p : ListFiles(dir, ".xml")) out.push_back(LoadAnnotationFile(p));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  return out;
}

// Every *.txt in `dir`; the image id of each detection is the file stem.
inline std::vector<Detection> LoadDetectionDir(const fs::path& dir) {
  std::vector<Detection> out;
  for (const auto& p : ListFiles(dir, ".txt")) {
    auto dets = ParseDetections(ReadTextFile(p), p.stem().string());
    out.insert(out.end(), std::make_move_iterator(dets.begin()),
               std::make_move_iterator(dets.end()));
  }
  return out;
}

}  // namespace vocbench
