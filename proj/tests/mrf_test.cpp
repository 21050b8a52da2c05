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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "twoseg/metrics.hpp"
#include "twoseg/mrf.hpp"
#include "twoseg/synth.hpp"

namespace twoseg {
namespace {

TEST(EnergyTest, HandArithmetic) {
  const auto img = new_label_image(2, 1, {0, 1}, 2);
  const Distribution t0({0.9, 0.1}), t1({0.1, 0.9});
  const EnergyParams p{0.0, 1e-12};
  EXPECT_NEAR(energy(img, BinaryMask(2, 1, {0, 1}), t0, t1, p), -2.0 * std::log(0.9), 1e-9);
  EXPECT_NEAR(energy(img, BinaryMask(2, 1, {0, 0}), t0, t1, p), -std::log(0.9) - std::log(0.1), 1e-9);
  EXPECT_NEAR(-2.0 * std::log(0.9), 0.2107, 1e-4);
  EXPECT_NEAR(-std::log(0.9) - std::log(0.1), 2.4079, 1e-4);
}

TEST(EnergyTest, ConstantMaskHasNoBoundaryCost) {
  Rng rng(1);
  const auto img = testing::random_image(rng, 6, 5, 3);
  const auto t = testing::random_dist(rng, 3);
  const auto mask = BinaryMask::filled(6, 5, 1);
  EXPECT_DOUBLE_EQ(energy(img, mask, t, t, EnergyParams{1e6}), energy(img, mask, t, t, EnergyParams{0.0}));
}

TEST(EnergyTest, ParamValidation) {
  EXPECT_THROW((EnergyParams{-1.0}).validate(), InvalidArgument);
  EXPECT_THROW((EnergyParams{1.0, 0.0}).validate(), InvalidArgument);
  EXPECT_THROW((EnergyParams{1.0, 1e-3}).validate(), InvalidArgument);
  const auto img = new_label_image(2, 1, {0, 1}, 2);
  EXPECT_THROW(energy(img, BinaryMask::filled(3, 1, 0), Distribution({.5, .5}), Distribution({.5, .5}), {}),
               InvalidArgument);
  EXPECT_THROW(segment_graphcut(img, Distribution({1.0}), Distribution({1.0}), {}), InvalidArgument);
}

TEST(SegmentTest, ZeroLambdaIsPerPixelArgmax) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto img = testing::random_image(rng, 7, 6, 5);
    const auto t0 = testing::random_dist(rng, 5), t1 = testing::random_dist(rng, 5);
    const auto s = segment_graphcut(img, t0, t1, EnergyParams{0.0});
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
      const auto l = img.labels()[p];
      EXPECT_EQ(s.bits()[p], t1[l] > t0[l] ? 1 : 0);
    }
  }
}

TEST(SegmentTest, ZeroLambdaTiesGoToLabelZero) {
  const auto img = new_label_image(3, 1, {0, 1, 2}, 3);
  const Distribution t0({0.5, 0.2, 0.3}), t1({0.5, 0.4, 0.1});
  const auto s = segment_graphcut(img, t0, t1, EnergyParams{0.0});
  EXPECT_EQ(s.bits()[0], 0);
  EXPECT_EQ(s.bits()[1], 1);
  EXPECT_EQ(s.bits()[2], 0);
}

// Exhaustive search over all 2^12 masks of a 3x4 image.
TEST(SegmentTest, GlobalOptimalityBruteForce) {
  Rng rng(5);
  for (int t = 0; t < 60; ++t) {
    const auto img = testing::random_image(rng, 3, 4, 3);
    const auto t0 = testing::random_dist(rng, 3), t1 = testing::random_dist(rng, 3);
    for (double lambda : {0.5, 1.0, 5.0}) {
      const EnergyParams p{lambda};
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::uint8_t> s(12);
      for (std::uint32_t bits = 0; bits < 4096; ++bits) {
        for (std::size_t i = 0; i < 12; ++i) s[i] = (bits >> i) & 1;
        best = std::min(best, testing::reference_energy(img, s, t0, t1, lambda, p.likelihood_floor));
      }
      const auto cut = segment_graphcut(img, t0, t1, p);
      const double got = testing::reference_energy(img, std::vector<std::uint8_t>(cut.bits().begin(), cut.bits().end()), t0,
                                          t1, lambda, p.likelihood_floor);
      EXPECT_NEAR(got, best, 1e-9 * std::max(1.0, best));
      EXPECT_NEAR(energy(img, cut, t0, t1, p), got, 1e-12 * std::max(1.0, got));
    }
  }
}

TEST(SegmentTest, BeatsRandomMasks) {
  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    const auto img = testing::random_image(rng, 12, 10, 4);
    const auto t0 = testing::random_dist(rng, 4), t1 = testing::random_dist(rng, 4);
    const EnergyParams p{1.0};
    const double e = energy(img, segment_graphcut(img, t0, t1, p), t0, t1, p);
    std::vector<std::uint8_t> bits(120);
    for (int i = 0; i < 1000; ++i) {
      for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
      EXPECT_LE(e, energy(img, BinaryMask(12, 10, bits), t0, t1, p) + 1e-9);
    }
  }
}

TEST(SegmentTest, BoundaryMonotoneInLambda) {
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto img = testing::random_image(rng, 16, 16, 4);
    const auto t0 = testing::random_dist(rng, 4), t1 = testing::random_dist(rng, 4);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double lambda : {0.0, 0.1, 0.3, 0.6, 1.0, 2.0, 4.0}) {
      const auto b = segment_graphcut(img, t0, t1, EnergyParams{lambda}).boundary_length();
      EXPECT_LE(b, prev);
      prev = b;
    }
  }
}

TEST(SegmentTest, IdenticalModelsGiveConstantMask) {
  Rng rng(11);
  const auto img = testing::random_image(rng, 10, 8, 5);
  const auto t = testing::random_dist(rng, 5);
  for (double lambda : {0.1, 1.0, 5.0}) {
    const auto s = segment_graphcut(img, t, t, EnergyParams{lambda});
    EXPECT_TRUE(s.count(0) == 0 || s.count(1) == 0);
  }
}

TEST(SegmentTest, SeparatedIidModelsSegmentWell) {
  const auto mask = gen_mask(MaskKind::kHalfVertical, 320, 320);
  const auto t0 = random_model(64, 1), t1 = random_model(64, 2);
  const auto img = gen_iid(mask, t0, t1, 3);
  EXPECT_GE(segmentation_score(mask, segment_graphcut(img, t0, t1, EnergyParams{5.0})).jac, 0.95);
}

TEST(NegativeLogLikelihoodTest, FlooredModelStaysFinite) {
  const auto nll = negative_log_likelihood(Distribution({1.0, 0.0}), 1e-8);
  EXPECT_TRUE(std::isfinite(nll[1]));
  EXPECT_NEAR(nll[1], -std::log(1e-8), 1e-9);
  EXPECT_THROW(negative_log_likelihood(Distribution::uniform(2000), 1e-3), InvalidArgument);
}

}  // namespace
}  // namespace twoseg
