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

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "vocbench/error.hpp"
#include "vocbench/fileio.hpp"
#include "vocbench/raster.hpp"

namespace vocbench {

namespace detail {

inline Raster DecodePng(const std::vector<unsigned char>& bytes,
                        const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    Fail(ErrorKind::kIo, "cannot decode PNG '" + name + "': " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  Raster out(image.width, image.height, 3);
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    Fail(ErrorKind::kIo, "cannot decode PNG '" + name + "': " + image.message);
  }
  return out;
}

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void JpegErrorExit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// No C++ objects with non-trivial destructors may live between setjmp and a
// longjmp, so the output raster is owned by the caller.
inline bool DecodeJpegInto(const std::vector<unsigned char>& bytes, Raster& out,
                           char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager err;
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = JpegErrorExit;
  if (setjmp(err.jump)) {
    std::memcpy(message, err.message, JMSG_LENGTH_MAX);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out.width = cinfo.output_width;
  out.height = cinfo.output_height;
  out.channels = 3;
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.pixels.data() +
                   static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

}  // namespace detail

// Decodes PNG or JPEG (detected by signature) into 8-bit RGB.
inline Raster ReadRaster(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  const std::vector<unsigned char> bytes(text.begin(), text.end());
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) {
    return detail::DecodePng(bytes, path.string());
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    Raster out;
    char message[JMSG_LENGTH_MAX] = {};
    if (!detail::DecodeJpegInto(bytes, out, message)) {
      Fail(ErrorKind::kIo, "cannot decode JPEG '" + path.string() + "': " + message);
    }
    return out;
  }
  Fail(ErrorKind::kIo, "'" + path.string() + "' is neither PNG nor JPEG");
}

// PNG bytes for `raster` (1, 3 or 4 channels). Output carries no timestamp, so
// equal rasters encode to equal bytes.
inline std::string EncodePng(const Raster& raster) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = raster.width;
  image.height = raster.height;
  switch (raster.channels) {
    case 1: image.format = PNG_FORMAT_GRAY; break;
    case 3: image.format = PNG_FORMAT_RGB; break;
    case 4: image.format = PNG_FORMAT_RGBA; break;
    default:
      Fail(ErrorKind::kUsage, "PNG encoding supports 1, 3 or 4 channels");
  }
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, raster.pixels.data(), 0,
                                 nullptr)) {
    Fail(ErrorKind::kIo, std::string("PNG encoding failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, raster.pixels.data(),
                                 0, nullptr)) {
    Fail(ErrorKind::kIo, std::string("PNG encoding failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

inline void WritePng(const fs::path& path, const Raster& raster) {
  WriteTextFile(path, EncodePng(raster));
}

}  // namespace vocbench
