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

// Alternation baseline: re-estimate smoothed region histograms from the
// current mask, re-segment with a graph cut, repeat until the mask stops
// changing.

#include <cmath>
#include <optional>
#include <vector>

#include "twoseg/core.hpp"
#include "twoseg/mrf.hpp"

namespace twoseg {

/// Centered axis-aligned square with side round(sqrt(|Omega|/2)), marked 1.
inline BinaryMask half_area_square(std::size_t width, std::size_t height) {
  const auto side_raw = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(width * height) / 2.0)));
  const std::size_t sw = std::min(side_raw, width);
  const std::size_t sh = std::min(side_raw, height);
  const std::size_t x0 = (width - sw) / 2;
  const std::size_t y0 = (height - sh) / 2;
  std::vector<std::uint8_t> bits(width * height, 0);
  for (std::size_t y = y0; y < y0 + sh; ++y) {
    for (std::size_t x = x0; x < x0 + sw; ++x) bits[y * width + x] = 1;
  }
  return BinaryMask(width, height, std::move(bits));
}

struct AltConfig {
  double lambda = 5.0;
  double smoothing_k = 1.0;
  std::size_t max_iters = 50;
  /// Defaults to half_area_square when unset.
  std::optional<BinaryMask> init;
  double likelihood_floor = 1e-8;

  void validate() const {
    if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
    if (!(smoothing_k >= 0.0)) throw InvalidArgument("smoothing constant K must be >= 0");
    EnergyParams{lambda, likelihood_floor}.validate();
  }
};

/// (count_i + K) / (N_region + K k).
inline Distribution region_histogram(const LabelImage& img, const BinaryMask& mask, std::uint8_t region, double K) {
  if (!mask.same_shape(img)) throw InvalidArgument("mask and image dimensions differ");
  if (region > 1) throw InvalidArgument("region must be 0 or 1");
  std::vector<double> counts(img.k(), 0.0);
  std::size_t n = 0;
  const auto labels = img.labels();
  const auto bits = mask.bits();
  for (std::size_t p = 0; p < labels.size(); ++p) {
    if (bits[p] == region) {
      counts[labels[p]] += 1.0;
      ++n;
    }
  }
  const double denom = static_cast<double>(n) + K * static_cast<double>(img.k());
  if (!(denom > 0.0)) throw DomainError("empty region with K = 0 has no histogram");
  for (double& c : counts) c = (c + K) / denom;
  return normalize_clamped(counts);
}

struct AltStep {
  std::size_t iteration;
  /// Energy of the mask produced in this iteration under the models it was cut with.
  double energy;
  std::size_t boundary_length;
  double w0;
  Distribution theta0;
  Distribution theta1;
};

struct AltResult {
  ModelEstimate estimate;
  BinaryMask mask;
  std::size_t iterations;
  bool converged;
  std::vector<AltStep> trace;

  bool single_region() const { return mask.count(0) == 0 || mask.count(1) == 0; }
};

inline AltResult alt_run(const LabelImage& img, const AltConfig& config = {}) {
  config.validate();
  const EnergyParams energy_params{config.lambda, config.likelihood_floor};
  BinaryMask mask = config.init ? *config.init : half_area_square(img.width(), img.height());
  if (!mask.same_shape(img)) throw InvalidArgument("initial mask and image dimensions differ");

  std::vector<AltStep> trace;
  bool converged = false;
  std::size_t it = 0;
  while (it < config.max_iters) {
    ++it;
    auto theta0 = region_histogram(img, mask, 0, config.smoothing_k);
    auto theta1 = region_histogram(img, mask, 1, config.smoothing_k);
    BinaryMask next = segment_graphcut(img, theta0, theta1, energy_params);
    const double e = energy(img, next, theta0, theta1, energy_params);
    trace.push_back({it, e, next.boundary_length(), next.w0(), std::move(theta0), std::move(theta1)});
    const bool same = next == mask;
    mask = std::move(next);
    if (same) {
      converged = true;
      break;
    }
  }

  // Final models are the smoothed histograms of the returned mask.
  auto theta0 = region_histogram(img, mask, 0, config.smoothing_k);
  auto theta1 = region_histogram(img, mask, 1, config.smoothing_k);
  // ALT does not model eps_r; an empty region is reported at the open
  // interval's edge so the estimate stays a valid mixture.
  double w0 = mask.w0();
  const double edge = 1.0 / static_cast<double>(2 * img.pixel_count());
  w0 = std::clamp(w0, edge, 1.0 - edge);
  ModelEstimate estimate{MixtureParams(w0, 0.0), std::move(theta0), std::move(theta1), 0.0};
  return {std::move(estimate), std::move(mask), it, converged, std::move(trace)};
}

}  // namespace twoseg
