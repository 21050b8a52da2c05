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

// First- and second-order label statistics of an image (alpha, beta), the
// two-region forward model that predicts them, and the independence gap
// ||beta - alpha alpha^T|| used to check that distant pixels decouple.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "twoseg/core.hpp"
#include "twoseg/rng.hpp"

namespace twoseg {

struct PairSamplingPolicy {
  enum class Mode { kExhaustive, kSampled };

  Mode mode = Mode::kExhaustive;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;

  static PairSamplingPolicy exhaustive() { return {}; }
  static PairSamplingPolicy sampled(std::size_t count, std::uint64_t seed) {
    if (count < 1) throw InvalidArgument("sampled pair policy needs sample_count >= 1");
    return {Mode::kSampled, count, seed};
  }
};

struct Offset {
  int dx;
  int dy;
  bool operator==(const Offset&) const = default;
};

/// Fraction of pixels carrying each label.
inline Distribution estimate_alpha(const LabelImage& img) {
  std::vector<std::uint64_t> counts(img.k(), 0);
  for (auto l : img.labels()) ++counts[l];
  std::vector<double> p(img.k());
  const double n = static_cast<double>(img.pixel_count());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
  return Distribution(std::move(p));
}

/// All integer offsets on the L1 circle |dx| + |dy| = r, in a fixed order.
inline std::vector<Offset> enumerate_offsets(int r) {
  if (r < 1) throw InvalidArgument("distance r must be >= 1, got " + std::to_string(r));
  std::vector<Offset> out;
  out.reserve(static_cast<std::size_t>(4 * r));
  for (int dx = -r; dx <= r; ++dx) {
    const int rest = r - std::abs(dx);
    out.push_back({dx, rest});
    if (rest != 0) out.push_back({dx, -rest});
  }
  return out;
}

namespace detail {

inline bool offset_fits(const Offset& o, std::size_t width, std::size_t height) {
  return static_cast<std::size_t>(std::abs(o.dx)) < width && static_cast<std::size_t>(std::abs(o.dy)) < height;
}

/// Calls fn(anchor_index, partner_index) for every ordered in-bounds pair at
/// the given offset, row by row.
template <typename Fn>
void for_each_pair(std::size_t width, std::size_t height, const Offset& o, Fn&& fn) {
  if (!offset_fits(o, width, height)) return;
  const std::size_t x_lo = o.dx < 0 ? static_cast<std::size_t>(-o.dx) : 0;
  const std::size_t x_hi = o.dx > 0 ? width - static_cast<std::size_t>(o.dx) : width;
  const std::size_t y_lo = o.dy < 0 ? static_cast<std::size_t>(-o.dy) : 0;
  const std::size_t y_hi = o.dy > 0 ? height - static_cast<std::size_t>(o.dy) : height;
  const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(o.dy) * static_cast<std::ptrdiff_t>(width) + o.dx;
  for (std::size_t y = y_lo; y < y_hi; ++y) {
    const std::size_t row = y * width;
    for (std::size_t x = x_lo; x < x_hi; ++x) {
      const std::size_t a = row + x;
      fn(a, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(a) + shift));
    }
  }
}

inline bool any_pair_fits(std::size_t width, std::size_t height, const std::vector<Offset>& offsets) {
  return std::any_of(offsets.begin(), offsets.end(),
                     [&](const Offset& o) { return offset_fits(o, width, height); });
}

}  // namespace detail

/// Empirical pair distribution beta_hat at L1 distance r.
inline PairDistribution estimate_beta(const LabelImage& img, int r,
                                      const PairSamplingPolicy& policy = PairSamplingPolicy::exhaustive()) {
  const auto offsets = enumerate_offsets(r);
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  if (!detail::any_pair_fits(w, h, offsets)) {
    throw InvalidArgument("no in-bounds pixel pairs at r=" + std::to_string(r) + " in a " + std::to_string(w) +
                          "x" + std::to_string(h) + " image");
  }
  const std::size_t k = img.k();
  const auto labels = img.labels();
  std::vector<std::uint64_t> counts(k * k, 0);
  std::uint64_t total = 0;

  if (policy.mode == PairSamplingPolicy::Mode::kExhaustive) {
    for (const auto& o : offsets) {
      detail::for_each_pair(w, h, o, [&](std::size_t a, std::size_t b) {
        ++counts[labels[a] * k + labels[b]];
      });
    }
  } else {
    if (policy.sample_count < 1) throw InvalidArgument("sampled pair policy needs sample_count >= 1");
    Rng rng(policy.seed);
    const std::uint64_t n = img.pixel_count();
    std::size_t accepted = 0;
    while (accepted < policy.sample_count) {
      const std::uint64_t a = rng.below(n);
      const auto& o = offsets[rng.below(offsets.size())];
      const auto x = static_cast<std::ptrdiff_t>(a % w) + o.dx;
      const auto y = static_cast<std::ptrdiff_t>(a / w) + o.dy;
      if (x < 0 || y < 0 || x >= static_cast<std::ptrdiff_t>(w) || y >= static_cast<std::ptrdiff_t>(h)) continue;
      ++counts[labels[a] * k + labels[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)]];
      ++accepted;
    }
  }
  for (auto c : counts) total += c;

  SquareMatrix beta(k);
  const double denom = static_cast<double>(total);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) beta(i, j) = static_cast<double>(counts[i * k + j]) / denom;
  }
  return PairDistribution(std::move(beta), r);
}

/// Row marginal of beta: the label distribution of a pixel drawn as one end of
/// an in-bounds pair. Border pixels belong to fewer pairs, so this differs
/// slightly from estimate_alpha; it is the alpha consistent with beta.
inline Distribution pair_marginal(const PairDistribution& beta) {
  std::vector<double> m(beta.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (double v : beta.matrix().row(i)) m[i] += v;
  }
  return normalize_clamped(m);
}

/// alpha = w0 theta0 + w1 theta1.
inline Distribution compose_alpha(const MixtureParams& params, const Distribution& theta0, const Distribution& theta1) {
  if (theta0.size() != theta1.size()) throw InvalidArgument("appearance models differ in length");
  std::vector<double> a(theta0.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = params.w0() * theta0[i] + params.w1() * theta1[i];
  return Distribution(std::move(a));
}

/// Forward model for beta given the region mixture and both appearance models.
inline PairDistribution compose_beta(const MixtureParams& params, const Distribution& theta0,
                                     const Distribution& theta1, int r = 0) {
  if (theta0.size() != theta1.size()) throw InvalidArgument("appearance models differ in length");
  const double eps = params.eps_r();
  if (eps > std::min(params.w0(), params.w1())) {
    throw DomainError("eps_r exceeds min(w0, w1): mixture weight would be negative");
  }
  const std::size_t k = theta0.size();
  const double c00 = params.w0() - eps;
  const double c11 = params.w1() - eps;
  SquareMatrix beta(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      beta(i, j) = c00 * theta0[i] * theta0[j] + c11 * theta1[i] * theta1[j] +
                   eps * (theta0[i] * theta1[j] + theta1[i] * theta0[j]);
    }
  }
  return PairDistribution(std::move(beta), r);
}

/// beta - alpha alpha^T; rank one under the two-region model.
inline SquareMatrix rank_one_residual(const Distribution& alpha, const PairDistribution& beta) {
  const std::size_t k = alpha.size();
  if (beta.size() != k) throw InvalidArgument("alpha and beta sizes differ");
  SquareMatrix m(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) m(i, j) = beta(i, j) - alpha[i] * alpha[j];
  }
  return m;
}

/// Frobenius norm of beta_hat - alpha_hat alpha_hat^T at distance r.
inline double independence_gap(const LabelImage& img, int r) {
  return rank_one_residual(estimate_alpha(img), estimate_beta(img, r)).frobenius_norm();
}

}  // namespace twoseg
