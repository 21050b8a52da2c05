// Copyright 2026 The twoseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Binary PGM (P5) and PPM (P6) with 8-bit samples.
//
// A P5 file with maxval m loads as a LabelImage over k = m + 1 labels, so an
// ordinary 8-bit grayscale image has k = 256 and a label image saved with
// k <= 256 round-trips exactly.

#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "twoseg/core.hpp"

namespace twoseg {

class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : IoError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb> pixels;

  RgbImage(std::size_t w, std::size_t h, std::vector<Rgb> px) : width(w), height(h), pixels(std::move(px)) {
    if (w == 0 || h == 0) throw InvalidArgument("image dimensions must be positive");
    if (pixels.size() != w * h) throw InvalidArgument("pixel count does not match dimensions");
  }

  std::size_t pixel_count() const { return pixels.size(); }
  bool operator==(const RgbImage&) const = default;
};

using LoadedImage = std::variant<LabelImage, RgbImage>;

namespace detail {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  std::size_t read_uint(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw ParseError(std::string("truncated header: missing ") + what, pos_);
    if (!std::isdigit(bytes_[pos_])) throw ParseError(std::string("malformed header: expected ") + what, pos_);
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (v > (std::size_t{1} << 31)) throw ParseError(std::string("malformed header: ") + what + " too large", pos_);
      ++pos_;
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, const std::string& header, std::span<const std::uint8_t> body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace detail

inline LoadedImage parse_netpbm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw ParseError("unsupported format: expected binary PGM (P5) or PPM (P6)", 0);
  }
  const bool rgb = bytes[1] == '6';
  detail::HeaderReader hdr(bytes);
  hdr.advance(2);
  const std::size_t width = hdr.read_uint("width");
  const std::size_t height = hdr.read_uint("height");
  const std::size_t maxval_pos = hdr.pos();
  const std::size_t maxval = hdr.read_uint("maxval");
  if (width == 0 || height == 0) throw ParseError("malformed header: zero dimension", maxval_pos);
  if (maxval == 0) throw ParseError("malformed header: maxval must be positive", maxval_pos);
  if (maxval > 255) throw ParseError("unsupported bit depth: maxval " + std::to_string(maxval) + " > 255", maxval_pos);
  if (hdr.pos() >= bytes.size() || !std::isspace(bytes[hdr.pos()])) {
    throw ParseError("malformed header: expected whitespace after maxval", hdr.pos());
  }
  hdr.advance(1);
  const std::size_t channels = rgb ? 3 : 1;
  const std::size_t need = width * height * channels;
  if (bytes.size() - hdr.pos() < need) {
    throw ParseError("truncated raster: expected " + std::to_string(need) + " bytes, found " +
                         std::to_string(bytes.size() - hdr.pos()),
                     bytes.size());
  }
  const auto raster = bytes.subspan(hdr.pos(), need);
  for (std::size_t i = 0; i < raster.size(); ++i) {
    if (raster[i] > maxval) throw ParseError("sample exceeds maxval", hdr.pos() + i);
  }
  if (rgb) {
    std::vector<Rgb> px(width * height);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = {raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]};
    return RgbImage(width, height, std::move(px));
  }
  std::vector<std::uint32_t> labels(raster.begin(), raster.end());
  return LabelImage(width, height, std::move(labels), maxval + 1);
}

inline LoadedImage load_image(const std::string& path) {
  const auto bytes = detail::read_file(path);
  try {
    return parse_netpbm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.offset());
  }
}

inline void save_label_image(const LabelImage& img, const std::string& path) {
  if (img.k() > 256) throw InvalidArgument("PGM output supports at most 256 labels");
  std::vector<std::uint8_t> body(img.labels().begin(), img.labels().end());
  detail::write_file(path,
                     "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
                         std::to_string(img.k() - 1) + "\n",
                     body);
}

inline void save_rgb(const RgbImage& img, const std::string& path) {
  std::vector<std::uint8_t> body;
  body.reserve(img.pixel_count() * 3);
  for (const auto& p : img.pixels) body.insert(body.end(), p.begin(), p.end());
  detail::write_file(path, "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n", body);
}

/// P5 with region 1 written as 255.
inline void save_mask(const BinaryMask& mask, const std::string& path) {
  std::vector<std::uint8_t> body(mask.pixel_count());
  for (std::size_t i = 0; i < body.size(); ++i) body[i] = mask.bits()[i] ? 255 : 0;
  detail::write_file(path, "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n",
                     body);
}

/// Any nonzero sample reads as region 1.
inline BinaryMask load_mask(const std::string& path) {
  auto img = load_image(path);
  const auto* gray = std::get_if<LabelImage>(&img);
  if (!gray) throw IoError("'" + path + "' is not a PGM mask");
  std::vector<std::uint8_t> bits(gray->pixel_count());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = gray->labels()[i] != 0;
  return BinaryMask(gray->width(), gray->height(), std::move(bits));
}

/// Labels spread over the gray ramp 0..255.
inline RgbImage render_gray(const LabelImage& img) {
  std::vector<Rgb> px(img.pixel_count());
  const double scale = img.k() > 1 ? 255.0 / static_cast<double>(img.k() - 1) : 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto v = static_cast<std::uint8_t>(std::lround(scale * img.labels()[i]));
    px[i] = {v, v, v};
  }
  return RgbImage(img.width(), img.height(), std::move(px));
}

inline bool is_contour(const BinaryMask& mask, std::size_t x, std::size_t y) {
  const auto v = mask.at(x, y);
  return (x > 0 && mask.at(x - 1, y) != v) || (x + 1 < mask.width() && mask.at(x + 1, y) != v) ||
         (y > 0 && mask.at(x, y - 1) != v) || (y + 1 < mask.height() && mask.at(x, y + 1) != v);
}

inline constexpr Rgb kContourColor = {255, 0, 0};

/// Copy of `base` with every pixel on the region boundary recolored.
inline RgbImage overlay_contour(const RgbImage& base, const BinaryMask& mask) {
  if (base.width != mask.width() || base.height != mask.height()) {
    throw InvalidArgument("overlay image and mask dimensions differ");
  }
  RgbImage out = base;
  for (std::size_t y = 0; y < base.height; ++y) {
    for (std::size_t x = 0; x < base.width; ++x) {
      if (is_contour(mask, x, y)) out.pixels[y * base.width + x] = kContourColor;
    }
  }
  return out;
}

inline void save_overlay(const RgbImage& base, const BinaryMask& mask, const std::string& path) {
  save_rgb(overlay_contour(base, mask), path);
}

}  // namespace twoseg
