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

// RGB -> label quantization by recursive random-hyperplane splits.
//
// Each node's pixel set is cut by a plane through its centroid with a
// uniformly random normal until every leaf holds at most max_bucket pixels.
// Leaves are numbered depth-first (the non-positive side first) and their
// mean colors form the palette.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "twoseg/core.hpp"
#include "twoseg/netpbm.hpp"
#include "twoseg/rng.hpp"

namespace twoseg {

struct PaletteEntry {
  std::array<double, 3> centroid;
  std::size_t count;
};

struct Palette {
  std::vector<PaletteEntry> entries;

  std::size_t size() const { return entries.size(); }
};

struct Quantization {
  LabelImage labels;
  Palette palette;
};

/// Redraws of a hyperplane that leaves one side empty before falling back to
/// a median split along the channel of largest variance.
inline constexpr int kMaxHyperplaneRedraws = 32;

namespace detail {

inline std::array<double, 3> centroid_of(const RgbImage& img, const std::vector<std::uint32_t>& idx) {
  std::array<double, 3> c{0, 0, 0};
  for (auto i : idx) {
    for (int ch = 0; ch < 3; ++ch) c[ch] += img.pixels[i][ch];
  }
  for (double& v : c) v /= static_cast<double>(idx.size());
  return c;
}

inline void median_split(const RgbImage& img, std::vector<std::uint32_t>& idx, const std::array<double, 3>& mean,
                         std::vector<std::uint32_t>& lo, std::vector<std::uint32_t>& hi) {
  std::array<double, 3> var{0, 0, 0};
  for (auto i : idx) {
    for (int ch = 0; ch < 3; ++ch) {
      const double d = img.pixels[i][ch] - mean[ch];
      var[ch] += d * d;
    }
  }
  const int ch = static_cast<int>(std::max_element(var.begin(), var.end()) - var.begin());
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return img.pixels[a][ch] < img.pixels[b][ch]; });
  const auto half = idx.begin() + static_cast<std::ptrdiff_t>(idx.size() / 2);
  lo.assign(idx.begin(), half);
  hi.assign(half, idx.end());
}

}  // namespace detail

inline Quantization quantize_colors(const RgbImage& img, std::size_t max_bucket = 1000, std::uint64_t seed = 0) {
  if (max_bucket < 1) throw InvalidArgument("max_bucket must be >= 1");
  Rng rng(seed);
  std::vector<std::uint32_t> labels(img.pixel_count(), 0);
  Palette palette;

  std::vector<std::vector<std::uint32_t>> stack;
  stack.emplace_back(img.pixel_count());
  std::iota(stack.back().begin(), stack.back().end(), 0u);

  while (!stack.empty()) {
    auto idx = std::move(stack.back());
    stack.pop_back();
    const auto mean = detail::centroid_of(img, idx);
    if (idx.size() <= max_bucket) {
      const auto label = static_cast<std::uint32_t>(palette.entries.size());
      for (auto i : idx) labels[i] = label;
      palette.entries.push_back({mean, idx.size()});
      continue;
    }
    std::vector<std::uint32_t> lo, hi;
    bool split = false;
    for (int attempt = 0; attempt < kMaxHyperplaneRedraws && !split; ++attempt) {
      std::array<double, 3> n{rng.normal(), rng.normal(), rng.normal()};
      lo.clear();
      hi.clear();
      for (auto i : idx) {
        double s = 0.0;
        for (int ch = 0; ch < 3; ++ch) s += (img.pixels[i][ch] - mean[ch]) * n[ch];
        (s > 0.0 ? hi : lo).push_back(i);
      }
      split = !lo.empty() && !hi.empty();
    }
    if (!split) detail::median_split(img, idx, mean, lo, hi);
    stack.push_back(std::move(hi));
    stack.push_back(std::move(lo));
  }
  const std::size_t k = palette.entries.size();
  return {LabelImage(img.width, img.height, std::move(labels), k), std::move(palette)};
}

/// Each label painted with its palette centroid.
inline RgbImage render_palette(const LabelImage& img, const Palette& palette) {
  if (palette.size() != img.k()) throw InvalidArgument("palette size does not match image alphabet");
  std::vector<Rgb> px(img.pixel_count());
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto& c = palette.entries[img.labels()[i]].centroid;
    px[i] = {static_cast<std::uint8_t>(std::lround(c[0])), static_cast<std::uint8_t>(std::lround(c[1])),
             static_cast<std::uint8_t>(std::lround(c[2]))};
  }
  return RgbImage(img.width(), img.height(), std::move(px));
}

}  // namespace twoseg
