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

#include <algorithm>
#include <cmath>
#include <limits>

#include "twoseg/core.hpp"

namespace twoseg {

struct EvalReport {
  double d_b = 0.0;
  double jac = 0.0;
  bool models_swapped = false;
  bool mask_swapped = false;
};

/// -ln sum_i sqrt(p_i q_i); +infinity for disjoint supports.
inline double bhattacharyya(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw InvalidArgument("distributions differ in length");
  double bc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
  if (!(bc > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -std::log(bc));
}

struct ModelDistance {
  double d_b;
  bool swapped;
};

/// Average Bhattacharyya distance under the better of the two label pairings.
inline ModelDistance model_distance(const Distribution& gt0, const Distribution& gt1, const Distribution& est0,
                                    const Distribution& est1) {
  const double direct = 0.5 * (bhattacharyya(gt0, est0) + bhattacharyya(gt1, est1));
  const double crossed = 0.5 * (bhattacharyya(gt0, est1) + bhattacharyya(gt1, est0));
  if (crossed < direct) return {crossed, true};
  return {direct, false};
}

/// |A n B| / |A u B| for the pixels where a == region_a and b == region_b.
inline double jaccard(const BinaryMask& a, std::uint8_t region_a, const BinaryMask& b, std::uint8_t region_b) {
  if (!a.same_shape(b)) throw InvalidArgument("mask dimensions differ");
  std::size_t inter = 0, uni = 0;
  const auto ba = a.bits();
  const auto bb = b.bits();
  for (std::size_t i = 0; i < ba.size(); ++i) {
    const bool in_a = ba[i] == region_a;
    const bool in_b = bb[i] == region_b;
    inter += in_a && in_b;
    uni += in_a || in_b;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Jaccard index of the regions marked 1 in each mask.
inline double jaccard(const BinaryMask& a, const BinaryMask& b) { return jaccard(a, 1, b, 1); }

struct SegmentationScore {
  double jac;
  bool swapped;
};

inline SegmentationScore segmentation_score(const BinaryMask& gt, const BinaryMask& est) {
  const double direct = 0.5 * (jaccard(gt, 0, est, 0) + jaccard(gt, 1, est, 1));
  const double crossed = 0.5 * (jaccard(gt, 0, est, 1) + jaccard(gt, 1, est, 0));
  if (crossed > direct) return {crossed, true};
  return {direct, false};
}

}  // namespace twoseg
