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

// Two-label MRF segmentation with fixed appearance models:
//
//   E(S) = -sum_x ln theta~_{S(x)}(I(x)) + lambda * #{4-neighbour pairs with S(x) != S(y)}
//
// minimized exactly by a single s-t min cut.

#include <cmath>
#include <string>
#include <vector>

#include "twoseg/core.hpp"
#include "twoseg/maxflow.hpp"

namespace twoseg {

struct EnergyParams {
  double lambda = 5.0;
  double likelihood_floor = 1e-8;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and >= 0");
    if (!(likelihood_floor > 0.0 && likelihood_floor < 1e-3)) {
      throw InvalidArgument("likelihood_floor must lie in (0, 1e-3)");
    }
  }
};

/// -ln of the floored model (1 - floor*k) theta + floor, per label.
inline std::vector<double> negative_log_likelihood(const Distribution& theta, double floor) {
  const std::size_t k = theta.size();
  const double keep = 1.0 - floor * static_cast<double>(k);
  if (!(keep > 0.0)) throw InvalidArgument("likelihood_floor * k must be < 1");
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = -std::log(keep * theta[i] + floor);
  return out;
}

namespace detail {

inline void check_models(const LabelImage& img, const Distribution& theta0, const Distribution& theta1) {
  if (theta0.size() != img.k() || theta1.size() != img.k()) {
    throw InvalidArgument("appearance model length (" + std::to_string(theta0.size()) + ", " +
                          std::to_string(theta1.size()) + ") does not match image alphabet k=" +
                          std::to_string(img.k()));
  }
}

}  // namespace detail

inline double energy(const LabelImage& img, const BinaryMask& mask, const Distribution& theta0,
                     const Distribution& theta1, const EnergyParams& params) {
  params.validate();
  detail::check_models(img, theta0, theta1);
  if (!mask.same_shape(img)) throw InvalidArgument("mask and image dimensions differ");
  const auto nll0 = negative_log_likelihood(theta0, params.likelihood_floor);
  const auto nll1 = negative_log_likelihood(theta1, params.likelihood_floor);
  const auto labels = img.labels();
  const auto bits = mask.bits();
  double data = 0.0;
  for (std::size_t p = 0; p < labels.size(); ++p) data += bits[p] ? nll1[labels[p]] : nll0[labels[p]];
  return data + params.lambda * static_cast<double>(mask.boundary_length());
}

/// Global minimizer of energy(). Pixels on the source side of the minimal
/// minimum cut get label 1, so ties resolve to label 0.
inline BinaryMask segment_graphcut(const LabelImage& img, const Distribution& theta0, const Distribution& theta1,
                                   const EnergyParams& params) {
  params.validate();
  detail::check_models(img, theta0, theta1);
  const auto nll0 = negative_log_likelihood(theta0, params.likelihood_floor);
  const auto nll1 = negative_log_likelihood(theta1, params.likelihood_floor);
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t n = img.pixel_count();
  const std::size_t source = n;
  const std::size_t sink = n + 1;
  const auto labels = img.labels();

  FlowNetwork net(n + 2, source, sink);
  net.reserve_edges(n * 3);
  for (std::size_t p = 0; p < n; ++p) {
    // Cutting source->p puts p on the sink side (label 0) and costs nll0;
    // cutting p->sink (label 1) costs nll1. Only the difference matters.
    const double diff = nll0[labels[p]] - nll1[labels[p]];
    if (diff > 0.0) {
      net.add_edge(source, p, diff);
    } else if (diff < 0.0) {
      net.add_edge(p, sink, -diff);
    }
  }
  if (params.lambda > 0.0) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t p = y * w + x;
        if (x + 1 < w) net.add_edge(p, p + 1, params.lambda, params.lambda);
        if (y + 1 < h) net.add_edge(p, p + w, params.lambda, params.lambda);
      }
    }
  }
  const auto cut = max_flow(net);
  std::vector<std::uint8_t> bits(cut.source_side.begin(), cut.source_side.begin() + static_cast<std::ptrdiff_t>(n));
  return BinaryMask(w, h, std::move(bits));
}

}  // namespace twoseg
