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
#include <span>
#include <vector>

#include "vocbench/error.hpp"

namespace vocbench {

// Interleaved 8-bit raster, row-major, `channels` samples per pixel.
struct Raster {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t channels = 3;
  std::vector<std::uint8_t> pixels;

  Raster() = default;
  Raster(std::uint32_t w, std::uint32_t h, std::uint32_t c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) {
    return pixels[index(x, y, c)];
  }
  std::uint8_t at(std::uint32_t x, std::uint32_t y, std::uint32_t c = 0) const {
    return pixels[index(x, y, c)];
  }
  std::span<const std::uint8_t> row(std::uint32_t y) const {
    return {pixels.data() + index(0, y), static_cast<std::size_t>(width) * channels};
  }
  bool empty() const { return pixels.empty(); }

  friend bool operator==(const Raster&, const Raster&) = default;
};

}  // namespace vocbench
