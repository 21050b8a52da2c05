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

// Synthetic benchmark data: parametric two-region masks, random appearance
// models, IID region images and row-wise Markov textures.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "twoseg/core.hpp"
#include "twoseg/rng.hpp"
#include "twoseg/stats.hpp"

namespace twoseg {

enum class MaskKind { kHalfVertical, kCenteredDisk, kQuarterSquare, kDiagonalBand };

inline constexpr std::array<MaskKind, 4> kAllMaskKinds = {MaskKind::kHalfVertical, MaskKind::kCenteredDisk,
                                                         MaskKind::kQuarterSquare, MaskKind::kDiagonalBand};

inline std::string to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::kHalfVertical: return "half_vertical";
    case MaskKind::kCenteredDisk: return "centered_disk";
    case MaskKind::kQuarterSquare: return "quarter_square";
    case MaskKind::kDiagonalBand: return "diagonal_band";
  }
  return "unknown";
}

inline MaskKind mask_kind_from_string(const std::string& s) {
  for (auto kind : kAllMaskKinds) {
    if (to_string(kind) == s) return kind;
  }
  throw InvalidArgument("unknown mask kind '" + s +
                        "' (expected half_vertical, centered_disk, quarter_square or diagonal_band)");
}

inline constexpr std::size_t kMinMaskSide = 8;
inline constexpr double kDiskAreaFraction = 0.3;

/// Region 0 is: the left half; a centered disk of area 0.3; a centered
/// rectangle of half the width and height; or the band |u - v| < 1 - 1/sqrt(2)
/// in normalized coordinates (area 0.5).
inline BinaryMask gen_mask(MaskKind kind, std::size_t width, std::size_t height) {
  if (width < kMinMaskSide || height < kMinMaskSide) {
    throw InvalidArgument("mask dimensions must be at least 8x8, got " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  std::vector<std::uint8_t> bits(width * height, 1);
  const double fw = static_cast<double>(width);
  const double fh = static_cast<double>(height);
  const double radius2 = kDiskAreaFraction * fw * fh / std::numbers::pi;
  const double band = 1.0 - 1.0 / std::numbers::sqrt2;
  const std::size_t sw = width / 2, sh = height / 2;
  const std::size_t sx = (width - sw) / 2, sy = (height - sh) / 2;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double cx = static_cast<double>(x) + 0.5;
      const double cy = static_cast<double>(y) + 0.5;
      bool inside = false;
      switch (kind) {
        case MaskKind::kHalfVertical: inside = x < width / 2; break;
        case MaskKind::kCenteredDisk: {
          const double dx = cx - fw / 2.0, dy = cy - fh / 2.0;
          inside = dx * dx + dy * dy <= radius2;
          break;
        }
        case MaskKind::kQuarterSquare: inside = x >= sx && x < sx + sw && y >= sy && y < sy + sh; break;
        case MaskKind::kDiagonalBand: inside = std::abs(cx / fw - cy / fh) < band; break;
      }
      if (inside) bits[y * width + x] = 0;
    }
  }
  return BinaryMask(width, height, std::move(bits));
}

/// Normalized vector of independent uniform(0,1) draws.
inline Distribution random_model(std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("random_model needs k >= 2");
  Rng rng(seed);
  std::vector<double> p(k);
  double sum = 0.0;
  for (double& v : p) {
    v = rng.uniform();
    sum += v;
  }
  for (double& v : p) v /= sum;
  return Distribution(std::move(p));
}

/// Each pixel drawn independently from the model of its region.
inline LabelImage gen_iid(const BinaryMask& mask, const Distribution& theta0, const Distribution& theta1,
                          std::uint64_t seed) {
  if (theta0.size() != theta1.size()) throw InvalidArgument("appearance models differ in length");
  Rng rng(seed);
  std::vector<std::uint32_t> labels(mask.pixel_count());
  const auto bits = mask.bits();
  for (std::size_t p = 0; p < labels.size(); ++p) {
    labels[p] = static_cast<std::uint32_t>(rng.categorical(bits[p] ? theta1.probs() : theta0.probs()));
  }
  return LabelImage(mask.width(), mask.height(), std::move(labels), theta0.size());
}

/// Row-stochastic transition matrix of a horizontal Markov chain.
struct TextureSpec {
  SquareMatrix transition;
  std::uint64_t seed = 0;

  void validate() const {
    const std::size_t k = transition.size();
    if (k == 0) throw InvalidArgument("transition matrix must be non-empty");
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (double v : transition.row(i)) {
        if (!(v >= 0.0)) throw InvalidArgument("transition probabilities must be >= 0");
        s += v;
      }
      if (std::abs(s - 1.0) > kProbabilityTolerance) {
        throw InvalidArgument("transition row " + std::to_string(i) + " sums to " + std::to_string(s));
      }
    }
  }
};

/// pi with pi P = pi and sum(pi) = 1, by Gaussian elimination with partial
/// pivoting on (P^T - I) with the last row replaced by the normalization.
inline Distribution stationary_distribution(const SquareMatrix& transition) {
  const std::size_t k = transition.size();
  std::vector<double> a(k * (k + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * (k + 1) + j]; };
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) at(i, j) = transition(j, i) - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t j = 0; j < k; ++j) at(k - 1, j) = 1.0;
  at(k - 1, k) = 1.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::abs(at(r, c)) > std::abs(at(piv, c))) piv = r;
    }
    if (std::abs(at(piv, c)) < 1e-300) throw DomainError("transition matrix has no unique stationary distribution");
    if (piv != c) {
      for (std::size_t j = 0; j <= k; ++j) std::swap(at(c, j), at(piv, j));
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c) continue;
      const double f = at(r, c) / at(c, c);
      if (f == 0.0) continue;
      for (std::size_t j = c; j <= k; ++j) at(r, j) -= f * at(c, j);
    }
  }
  std::vector<double> pi(k);
  for (std::size_t i = 0; i < k; ++i) pi[i] = at(i, k) / at(i, i);
  return normalize_clamped(pi);
}

/// P = stay * I + (1 - stay) * 1 theta^T; its stationary distribution is theta.
inline SquareMatrix sticky_transition(const Distribution& theta, double stay) {
  if (!(stay >= 0.0 && stay < 1.0)) throw InvalidArgument("stay probability must lie in [0,1)");
  const std::size_t k = theta.size();
  SquareMatrix p(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) p(i, j) = (1.0 - stay) * theta[j] + (i == j ? stay : 0.0);
  }
  return p;
}

/// Random transition matrix whose diagonal entries are all >= min_diagonal.
inline SquareMatrix random_transition(std::size_t k, double min_diagonal, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("random_transition needs k >= 2");
  if (!(min_diagonal >= 0.0 && min_diagonal < 1.0)) throw InvalidArgument("min_diagonal must lie in [0,1)");
  Rng rng(seed);
  SquareMatrix p(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double diag = min_diagonal + (1.0 - min_diagonal) * 0.5 * rng.uniform();
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      p(i, j) = rng.uniform();
      sum += p(i, j);
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (j != i) p(i, j) *= (1.0 - diag) / sum;
    }
    p(i, i) = diag;
  }
  return p;
}

namespace detail {

inline std::vector<std::uint32_t> markov_rows(const TextureSpec& spec, std::size_t width, std::size_t height) {
  const auto start = stationary_distribution(spec.transition);
  Rng rng(spec.seed);
  std::vector<std::uint32_t> out(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    std::size_t state = rng.categorical(start.probs());
    out[y * width] = static_cast<std::uint32_t>(state);
    for (std::size_t x = 1; x < width; ++x) {
      state = rng.categorical(spec.transition.row(state));
      out[y * width + x] = static_cast<std::uint32_t>(state);
    }
  }
  return out;
}

}  // namespace detail

/// Each region is cut out of a full-size texture whose rows are independent
/// stationary Markov chains with that region's transition matrix.
inline LabelImage gen_texture(const BinaryMask& mask, const TextureSpec& spec0, const TextureSpec& spec1) {
  spec0.validate();
  spec1.validate();
  if (spec0.transition.size() != spec1.transition.size()) throw InvalidArgument("texture alphabets differ");
  const auto tex0 = detail::markov_rows(spec0, mask.width(), mask.height());
  const auto tex1 = detail::markov_rows(spec1, mask.width(), mask.height());
  std::vector<std::uint32_t> labels(mask.pixel_count());
  const auto bits = mask.bits();
  for (std::size_t p = 0; p < labels.size(); ++p) labels[p] = bits[p] ? tex1[p] : tex0[p];
  return LabelImage(mask.width(), mask.height(), std::move(labels), spec0.transition.size());
}

/// Probability that an ordered in-bounds pair at L1 distance r has its first
/// pixel in region 0 and its second in region 1 (half the straddling fraction).
inline double measure_epsilon(const BinaryMask& mask, int r) {
  const auto offsets = enumerate_offsets(r);
  if (!detail::any_pair_fits(mask.width(), mask.height(), offsets)) {
    throw InvalidArgument("no in-bounds pixel pairs at r=" + std::to_string(r));
  }
  const auto bits = mask.bits();
  std::uint64_t total = 0, differ = 0;
  for (const auto& o : offsets) {
    detail::for_each_pair(mask.width(), mask.height(), o, [&](std::size_t a, std::size_t b) {
      ++total;
      differ += bits[a] != bits[b];
    });
  }
  return 0.5 * static_cast<double>(differ) / static_cast<double>(total);
}

}  // namespace twoseg
