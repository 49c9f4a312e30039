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
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"
#include "vocbench/annotation.hpp"
#include "vocbench/error.hpp"
#include "vocbench/fileio.hpp"
#include "vocbench/parallel.hpp"
#include "vocbench/raster.hpp"
#include "vocbench/raster_io.hpp"
#include "vocbench/rng.hpp"
#include "vocbench/tiling.hpp"
#include "vocbench/voc_io.hpp"

namespace vocbench {

// Parameter ranges of the seven augmentation rows.
inline constexpr double kMaxRotationDeg = 60.0;
inline constexpr double kMinScale = 0.50;
inline constexpr double kMaxScale = 1.50;
inline constexpr double kMaxTranslationFraction = 0.30;
inline constexpr double kMinBlurSigma = 1.0;
inline constexpr double kMaxBlurSigma = 3.0;
inline constexpr double kMinNoiseSigma = 0.03 * 255;
inline constexpr double kMaxNoiseSigma = 0.07 * 255;

// Order doubles as the canonical composition order of Combination3.
enum class Variant {
  kRotation,
  kScaling,
  kTranslation,
  kFlip,
  kBlur,
  kNoise,
  kCombination3,
};
inline constexpr int kNumVariants = 7;
inline constexpr int kNumSingleVariants = 6;

inline std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kRotation: return "rotation";
    case Variant::kScaling: return "scaling";
    case Variant::kTranslation: return "translation";
    case Variant::kFlip: return "flip";
    case Variant::kBlur: return "blur";
    case Variant::kNoise: return "noise";
    case Variant::kCombination3: return "combination3";
  }
  return "unknown";
}

inline bool IsGeometric(Variant v) {
  return v == Variant::kRotation || v == Variant::kScaling ||
         v == Variant::kTranslation || v == Variant::kFlip;
}

// Position of a single variant when composed inside Combination3. A flip
// precedes a translation, so a translation keeps its sampled direction.
inline int CompositionRank(Variant v) {
  switch (v) {
    case Variant::kRotation: return 0;
    case Variant::kScaling: return 1;
    case Variant::kFlip: return 2;
    case Variant::kTranslation: return 3;
    case Variant::kBlur: return 4;
    case Variant::kNoise: return 5;
    case Variant::kCombination3: break;
  }
  return 6;
}

// Counter-clockwise as displayed (image y axis points down), about the centre.
struct Rotation {
  double angle_deg = 0;
};
// About the image centre.
struct Scaling {
  double factor = 1;
};
enum class Direction { kLeft, kRight };
struct Translation {
  double fraction = 0;  // of image width
  Direction direction = Direction::kRight;
};
// Horizontal mirror.
struct Flip {};
struct Blur {
  double sigma = 1;
};
// Additive per-sample N(0, sigma); `seed` drives the pixel noise.
struct Noise {
  double sigma = kMinNoiseSigma;
  std::uint64_t seed = 0;
};

using SingleOp = std::variant<Rotation, Scaling, Translation, Flip, Blur, Noise>;

// Three distinct single ops, stored in canonical order.
class Combination3 {
 public:
  explicit Combination3(std::array<SingleOp, 3> ops) : ops_(std::move(ops)) {
    std::sort(ops_.begin(), ops_.end(),
              [](const SingleOp& a, const SingleOp& b) {
                return CompositionRank(static_cast<Variant>(a.index())) <
                       CompositionRank(static_cast<Variant>(b.index()));
              });
    if (ops_[0].index() == ops_[1].index() || ops_[1].index() == ops_[2].index()) {
      Fail(ErrorKind::kUsage, "Combination3 requires three distinct transformations");
    }
  }
  const std::array<SingleOp, 3>& ops() const { return ops_; }

 private:
  std::array<SingleOp, 3> ops_;
};

using AugmentOp =
    std::variant<Rotation, Scaling, Translation, Flip, Blur, Noise, Combination3>;

inline Variant VariantOf(const AugmentOp& op) { return static_cast<Variant>(op.index()); }
inline Variant VariantOf(const SingleOp& op) { return static_cast<Variant>(op.index()); }

inline SingleOp SampleSingleOp(Variant variant, Rng& rng) {
  switch (variant) {
    case Variant::kRotation:
      return Rotation{rng.Uniform(-kMaxRotationDeg, kMaxRotationDeg)};
    case Variant::kScaling:
      return Scaling{rng.Uniform(kMinScale, kMaxScale)};
    case Variant::kTranslation: {
      const double fraction = rng.Uniform(0, kMaxTranslationFraction);
      return Translation{fraction, rng.Coin() ? Direction::kRight : Direction::kLeft};
    }
    case Variant::kFlip:
      return Flip{};
    case Variant::kBlur:
      return Blur{rng.Uniform(kMinBlurSigma, kMaxBlurSigma)};
    case Variant::kNoise: {
      const double sigma = rng.Uniform(kMinNoiseSigma, kMaxNoiseSigma);
      return Noise{sigma, rng.Next()};
    }
    case Variant::kCombination3:
      break;
  }
  Fail(ErrorKind::kUsage, "not a single transformation");
}

// Draws the parameters of `variant` uniformly from its range. Combination3
// picks three distinct single variants first.
inline AugmentOp SampleOp(Variant variant, Rng& rng) {
  if (variant != Variant::kCombination3) {
    return std::visit([](auto&& op) -> AugmentOp { return op; },
                      SampleSingleOp(variant, rng));
  }
  std::vector<int> pool(kNumSingleVariants);
  for (int i = 0; i < kNumSingleVariants; ++i) pool[i] = i;
  std::array<SingleOp, 3> picked;
  for (int k = 0; k < 3; ++k) {
    const auto j = k + static_cast<int>(rng.Below(kNumSingleVariants - k));
    std::swap(pool[k], pool[j]);
    picked[k] = SampleSingleOp(static_cast<Variant>(pool[k]), rng);
  }
  return Combination3(std::move(picked));
}

// x' = a x + b y + c,  y' = d x + e y + f
struct Affine {
  double a = 1, b = 0, c = 0;
  double d = 0, e = 1, f = 0;

  std::array<double, 2> apply(double x, double y) const {
    return {a * x + b * y + c, d * x + e * y + f};
  }
  // (*this) after `first`
  Affine after(const Affine& first) const {
    return {a * first.a + b * first.d, a * first.b + b * first.e, a * first.c + b * first.f + c,
            d * first.a + e * first.d, d * first.b + e * first.e, d * first.c + e * first.f + f};
  }
  Affine inverse() const {
    const double det = a * e - b * d;
    if (det == 0) Fail(ErrorKind::kUsage, "singular transform");
    const double ia = e / det, ib = -b / det, id = -d / det, ie = a / det;
    return {ia, ib, -(ia * c + ib * f), id, ie, -(id * c + ie * f)};
  }
};

// Forward transform of a geometric op on a width x height canvas; identity for
// photometric ops.
inline Affine ForwardTransform(const SingleOp& op, double width, double height) {
  const double cx = width / 2, cy = height / 2;
  return std::visit(
      [&](auto&& o) -> Affine {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Rotation>) {
          const double t = o.angle_deg * std::numbers::pi / 180.0;
          const double cs = std::cos(t), sn = std::sin(t);
          return {cs, sn, cx - cs * cx - sn * cy, -sn, cs, cy + sn * cx - cs * cy};
        } else if constexpr (std::is_same_v<T, Scaling>) {
          return {o.factor, 0, cx - o.factor * cx, 0, o.factor, cy - o.factor * cy};
        } else if constexpr (std::is_same_v<T, Translation>) {
          const double dx = (o.direction == Direction::kRight ? 1 : -1) * o.fraction * width;
          return {1, 0, dx, 0, 1, 0};
        } else if constexpr (std::is_same_v<T, Flip>) {
          return {-1, 0, width, 0, 1, 0};
        } else {
          return {};
        }
      },
      op);
}

// Inverse-mapped bilinear warp; samples falling outside the source are black.
inline Raster WarpAffine(const Raster& src, const Affine& forward) {
  const Affine inv = forward.inverse();
  Raster out(src.width, src.height, src.channels, 0);
  const int w = static_cast<int>(src.width), h = static_cast<int>(src.height);
  std::vector<double> acc(src.channels);
  for (std::uint32_t y = 0; y < src.height; ++y) {
    for (std::uint32_t x = 0; x < src.width; ++x) {
      const auto [sx, sy] = inv.apply(x + 0.5, y + 0.5);
      const double fx = sx - 0.5, fy = sy - 0.5;
      const double flx = std::floor(fx), fly = std::floor(fy);
      if (flx < -1 || fly < -1 || flx > w || fly > h) continue;
      const int x0 = static_cast<int>(flx), y0 = static_cast<int>(fly);
      const double tx = fx - flx, ty = fy - fly;
      std::fill(acc.begin(), acc.end(), 0.0);
      const double wts[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int k = 0; k < 4; ++k) {
        if (wts[k] == 0 || xs[k] < 0 || ys[k] < 0 || xs[k] >= w || ys[k] >= h) continue;
        for (std::uint32_t c = 0; c < src.channels; ++c) {
          acc[c] += wts[k] * src.at(xs[k], ys[k], c);
        }
      }
      for (std::uint32_t c = 0; c < src.channels; ++c) {
        out.at(x, y, c) =
            static_cast<std::uint8_t>(std::clamp(std::floor(acc[c] + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

// Axis-aligned hull of the four transformed corners, clipped to the canvas.
// Kept when `keep` accepts the clipped hull relative to the unclipped hull.
inline std::optional<BBox> MapBox(const BBox& box, const Affine& forward, double width,
                                  double height, const KeepPolicy& keep) {
  const std::array<std::array<double, 2>, 4> corners = {
      forward.apply(box.xmin, box.ymin), forward.apply(box.xmax, box.ymin),
      forward.apply(box.xmin, box.ymax), forward.apply(box.xmax, box.ymax)};
  BBox hull{corners[0][0], corners[0][1], corners[0][0], corners[0][1]};
  for (const auto& [x, y] : corners) {
    hull.xmin = std::min(hull.xmin, x);
    hull.ymin = std::min(hull.ymin, y);
    hull.xmax = std::max(hull.xmax, x);
    hull.ymax = std::max(hull.ymax, y);
  }
  const auto clipped = Intersect(hull, BBox{0, 0, width, height});
  if (!clipped || !keep.keeps(*clipped, hull.area())) return std::nullopt;
  return clipped;
}

struct Augmented {
  Raster image;
  std::vector<GroundTruthObject> objects;
};

inline Augmented ApplyTransform(const Raster& image,
                                const std::vector<GroundTruthObject>& objects,
                                const Affine& forward, const KeepPolicy& keep) {
  Augmented out{WarpAffine(image, forward), {}};
  for (const auto& obj : objects) {
    if (auto mapped = MapBox(obj.bbox, forward, image.width, image.height, keep)) {
      out.objects.push_back({obj.label, *mapped});
    }
  }
  return out;
}

inline Augmented ApplyGeometric(const Raster& image,
                                const std::vector<GroundTruthObject>& objects,
                                const SingleOp& op, const KeepPolicy& keep = {}) {
  if (!IsGeometric(VariantOf(op))) {
    Fail(ErrorKind::kUsage, "ApplyGeometric given a photometric transformation");
  }
  return ApplyTransform(image, objects, ForwardTransform(op, image.width, image.height),
                        keep);
}

namespace detail {

inline int Reflect(int i, int n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

}  // namespace detail

// Separable Gaussian filter, radius ceil(3 sigma), symmetric reflection at
// the borders.
inline Raster GaussianBlur(const Raster& src, double sigma) {
  if (!(sigma > 0)) Fail(ErrorKind::kRange, "blur sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-(k * k) / (2 * sigma * sigma));
    total += kernel[k + radius];
  }
  for (auto& v : kernel) v /= total;

  const int w = static_cast<int>(src.width), h = static_cast<int>(src.height);
  const int ch = static_cast<int>(src.channels);
  std::vector<double> tmp(src.pixels.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double s = 0;
        for (int k = -radius; k <= radius; ++k) {
          s += kernel[k + radius] * src.at(detail::Reflect(x + k, w), y, c);
        }
        tmp[src.index(x, y, c)] = s;
      }
    }
  }
  Raster out(src.width, src.height, src.channels);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        double s = 0;
        for (int k = -radius; k <= radius; ++k) {
          s += kernel[k + radius] * tmp[src.index(x, detail::Reflect(y + k, h), c)];
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(s + 0.5), 0.0, 255.0));
      }
    }
  }
  return out;
}

inline Raster AddGaussianNoise(const Raster& src, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  Raster out = src;
  for (auto& v : out.pixels) {
    const double noisy = v + sigma * rng.Normal();
    v = static_cast<std::uint8_t>(std::clamp(std::floor(noisy + 0.5), 0.0, 255.0));
  }
  return out;
}

inline Raster ApplyPhotometric(const Raster& image, const SingleOp& op) {
  if (const auto* blur = std::get_if<Blur>(&op)) return GaussianBlur(image, blur->sigma);
  if (const auto* noise = std::get_if<Noise>(&op)) {
    return AddGaussianNoise(image, noise->sigma, noise->seed);
  }
  Fail(ErrorKind::kUsage, "ApplyPhotometric given a geometric transformation");
}

// Geometric members are composed into one transform (one resampling, one
// corner hull per box), then the photometric members run in order.
inline Augmented ApplyCombination3(const Raster& image,
                                   const std::vector<GroundTruthObject>& objects,
                                   const Combination3& combo, const KeepPolicy& keep = {}) {
  Affine forward;
  bool any_geometric = false;
  for (const auto& op : combo.ops()) {
    if (!IsGeometric(VariantOf(op))) continue;
    forward = ForwardTransform(op, image.width, image.height).after(forward);
    any_geometric = true;
  }
  Augmented out = any_geometric ? ApplyTransform(image, objects, forward, keep)
                                : Augmented{image, objects};
  for (const auto& op : combo.ops()) {
    if (!IsGeometric(VariantOf(op))) out.image = ApplyPhotometric(out.image, op);
  }
  return out;
}

// The single op held by `op`, or nullopt for Combination3.
inline std::optional<SingleOp> AsSingleOp(const AugmentOp& op) {
  return std::visit(
      [](auto&& o) -> std::optional<SingleOp> {
        if constexpr (std::is_same_v<std::decay_t<decltype(o)>, Combination3>) {
          return std::nullopt;
        } else {
          return o;
        }
      },
      op);
}

inline Augmented ApplyOp(const Raster& image, const std::vector<GroundTruthObject>& objects,
                         const AugmentOp& op, const KeepPolicy& keep = {}) {
  const auto single = AsSingleOp(op);
  if (!single) return ApplyCombination3(image, objects, std::get<Combination3>(op), keep);
  if (IsGeometric(VariantOf(*single))) return ApplyGeometric(image, objects, *single, keep);
  return {ApplyPhotometric(image, *single), objects};
}

inline nlohmann::json SingleOpParams(const SingleOp& op) {
  return std::visit(
      [](auto&& o) -> nlohmann::json {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Rotation>) {
          return {{"angle_deg", o.angle_deg}};
        } else if constexpr (std::is_same_v<T, Scaling>) {
          return {{"factor", o.factor}};
        } else if constexpr (std::is_same_v<T, Translation>) {
          return {{"fraction", o.fraction},
                  {"direction", o.direction == Direction::kRight ? "right" : "left"}};
        } else if constexpr (std::is_same_v<T, Flip>) {
          return nlohmann::json::object();
        } else if constexpr (std::is_same_v<T, Blur>) {
          return {{"sigma", o.sigma}};
        } else {
          return {{"sigma", o.sigma}, {"seed", o.seed}};
        }
      },
      op);
}

inline nlohmann::json OpParams(const AugmentOp& op) {
  if (const auto single = AsSingleOp(op)) return SingleOpParams(*single);
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& member : std::get<Combination3>(op).ops()) {
    nlohmann::json p = SingleOpParams(member);
    p["variant"] = VariantName(VariantOf(member));
    parts.push_back(std::move(p));
  }
  return {{"ops", std::move(parts)}};
}

struct AugmentOptions {
  std::uint32_t multiplicity = 3;
  std::uint64_t seed = 0;
  KeepPolicy keep;
  unsigned jobs = 1;
};

struct AugmentRecord {
  std::string aug_id;
  std::string source_id;
  Variant variant = Variant::kFlip;
  std::string params_json;

  friend bool operator==(const AugmentRecord&, const AugmentRecord&) = default;
};

// The ops applied to item `ordinal`, one per extra copy. A function of
// (seed, ordinal) only.
inline std::vector<AugmentOp> PlanAugmentations(std::uint64_t seed, std::uint64_t ordinal,
                                                std::uint32_t multiplicity) {
  Rng rng(DeriveSeed(seed, ordinal));
  std::vector<AugmentOp> ops;
  ops.reserve(multiplicity);
  for (std::uint32_t k = 0; k < multiplicity; ++k) {
    ops.push_back(SampleOp(static_cast<Variant>(rng.Below(kNumVariants)), rng));
  }
  return ops;
}

inline std::string AugmentManifestCsv(const std::vector<AugmentRecord>& records) {
  std::string out = "aug_id,source_id,variant,params_json\n";
  for (const auto& r : records) {
    std::string quoted = "\"";
    for (char c : r.params_json) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
    out += r.aug_id + "," + r.source_id + "," + std::string(VariantName(r.variant)) + "," +
           quoted + "\n";
  }
  return out;
}

// Copies every source image and annotation to `out_dir` and adds
// `multiplicity` transformed copies of each, with ids
// `<id>_aug<k>_<variant>`. `annotations` order defines the item ordinals.
// Writes `<out>/augmentations.csv`; returns its rows sorted by id.
inline std::vector<AugmentRecord> AugmentDataset(const std::vector<ImageAnnotation>& annotations,
                                                 const fs::path& images_dir,
                                                 const fs::path& annotations_dir,
                                                 const fs::path& out_dir,
                                                 const AugmentOptions& options) {
  EnsureDirectory(out_dir / "images");
  EnsureDirectory(out_dir / "annotations");
  std::vector<std::vector<AugmentRecord>> per_item(annotations.size());
  ParallelFor(annotations.size(), options.jobs, [&](std::size_t i) {
    const ImageAnnotation& ann = annotations[i];
    const fs::path image_path = FindImageFile(images_dir, ann);
    std::error_code ec;
    fs::copy_file(image_path, out_dir / "images" / image_path.filename(),
                  fs::copy_options::overwrite_existing, ec);
    if (ec) Fail(ErrorKind::kIo, "cannot copy '" + image_path.string() + "': " + ec.message());
    const fs::path xml_path = annotations_dir / (ann.image_id + ".xml");
    if (fs::is_regular_file(xml_path)) {
      WriteTextFile(out_dir / "annotations" / xml_path.filename(), ReadTextFile(xml_path));
    } else {
      WriteTextFile(out_dir / "annotations" / (ann.image_id + ".xml"), WriteAnnotation(ann));
    }
    if (options.multiplicity == 0) return;

    const Raster image = ReadRaster(image_path);
    if (image.width != ann.width || image.height != ann.height) {
      Fail(ErrorKind::kConsistency, "'" + image_path.string() + "' does not match the " +
                                        "size in its annotation");
    }
    const auto ops = PlanAugmentations(options.seed, i, options.multiplicity);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const Variant variant = VariantOf(ops[k]);
      const std::string id = ann.image_id + "_aug" + std::to_string(k + 1) + "_" +
                             std::string(VariantName(variant));
      Augmented result = ApplyOp(image, ann.objects, ops[k], options.keep);
      ImageAnnotation out_ann = ann;
      out_ann.image_id = id;
      out_ann.filename = id + ".png";
      out_ann.objects = std::move(result.objects);
      WritePng(out_dir / "images" / out_ann.filename, result.image);
      WriteTextFile(out_dir / "annotations" / (id + ".xml"), WriteAnnotation(out_ann));
      per_item[i].push_back({id, ann.image_id, variant, OpParams(ops[k]).dump()});
    }
  });
  std::vector<AugmentRecord> records;
  for (auto& v : per_item) records.insert(records.end(), v.begin(), v.end());
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.aug_id < b.aug_id; });
  WriteTextFile(out_dir / "augmentations.csv", AugmentManifestCsv(records));
  return records;
}

}  // namespace vocbench
