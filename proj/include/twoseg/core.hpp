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

// Domain types shared by every twoseg module: label images, binary masks,
// distributions over the label alphabet, pair distributions and the
// two-region mixture parameters.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twoseg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The data does not satisfy a modelling condition (e.g. w0*w1 >= eps_r).
class DomainError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kProbabilityTolerance = 1e-9;

/// Dense row-major square matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * n_, n_);
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend SquareMatrix operator-(const SquareMatrix& a, const SquareMatrix& b) {
    if (a.n_ != b.n_) throw InvalidArgument("matrix size mismatch");
    SquareMatrix out(a.n_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] - b.data_[i];
    return out;
  }

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Image over a discrete alphabet {0, ..., k-1}, stored row-major.
class LabelImage {
 public:
  LabelImage(std::size_t width, std::size_t height, std::vector<std::uint32_t> labels, std::size_t k)
      : width_(width), height_(height), k_(k), labels_(std::move(labels)) {
    if (width == 0 || height == 0) throw InvalidArgument("image dimensions must be positive");
    if (k == 0) throw InvalidArgument("alphabet size k must be positive");
    if (labels_.size() != width * height) {
      throw InvalidArgument("label count " + std::to_string(labels_.size()) + " does not match " +
                            std::to_string(width) + "x" + std::to_string(height));
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] >= k) {
        throw InvalidArgument("label " + std::to_string(labels_[i]) + " at index " + std::to_string(i) +
                              " is out of range for k=" + std::to_string(k));
      }
    }
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return labels_.size(); }
  std::size_t k() const { return k_; }
  std::uint32_t at(std::size_t x, std::size_t y) const { return labels_[y * width_ + x]; }
  std::span<const std::uint32_t> labels() const { return labels_; }

  bool operator==(const LabelImage&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t k_;
  std::vector<std::uint32_t> labels_;
};

inline LabelImage new_label_image(std::size_t width, std::size_t height, std::vector<std::uint32_t> labels,
                                  std::size_t k) {
  return LabelImage(width, height, std::move(labels), k);
}

/// Two-region assignment S. Bit value s means the pixel belongs to region R_s.
class BinaryMask {
 public:
  BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
      : width_(width), height_(height), bits_(std::move(bits)) {
    if (width == 0 || height == 0) throw InvalidArgument("mask dimensions must be positive");
    if (bits_.size() != width * height) throw InvalidArgument("mask bit count does not match dimensions");
    for (auto b : bits_) {
      if (b > 1) throw InvalidArgument("mask values must be 0 or 1");
    }
  }

  static BinaryMask filled(std::size_t width, std::size_t height, std::uint8_t value) {
    return BinaryMask(width, height, std::vector<std::uint8_t>(width * height, value));
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return bits_.size(); }
  std::uint8_t at(std::size_t x, std::size_t y) const { return bits_[y * width_ + x]; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t count(std::uint8_t region) const {
    std::size_t n = 0;
    for (auto b : bits_) n += (b == region);
    return n;
  }

  /// Area fraction of region 0.
  double w0() const { return static_cast<double>(count(0)) / static_cast<double>(bits_.size()); }

  BinaryMask complement() const {
    std::vector<std::uint8_t> out(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) out[i] = static_cast<std::uint8_t>(1 - bits_[i]);
    return BinaryMask(width_, height_, std::move(out));
  }

  /// Number of 4-neighbour pairs with differing labels.
  std::size_t boundary_length() const {
    std::size_t n = 0;
    for (std::size_t y = 0; y < height_; ++y) {
      for (std::size_t x = 0; x < width_; ++x) {
        if (x + 1 < width_ && at(x, y) != at(x + 1, y)) ++n;
        if (y + 1 < height_ && at(x, y) != at(x, y + 1)) ++n;
      }
    }
    return n;
  }

  bool same_shape(const BinaryMask& o) const { return width_ == o.width_ && height_ == o.height_; }
  bool same_shape(const LabelImage& img) const { return width_ == img.width() && height_ == img.height(); }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> bits_;
};

/// Probability vector over the label alphabet.
class Distribution {
 public:
  /// Validates non-negativity and sum-to-one within kProbabilityTolerance.
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw InvalidArgument("distribution must have at least one entry");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("distribution entries must be finite and >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      throw InvalidArgument("distribution sums to " + std::to_string(sum) + ", expected 1");
    }
  }

  static Distribution uniform(std::size_t k) { return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k))); }

  static Distribution delta(std::size_t k, std::size_t at) {
    if (at >= k) throw InvalidArgument("delta index out of range");
    std::vector<double> p(k, 0.0);
    p[at] = 1.0;
    return Distribution(std::move(p));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<double> probs_;
};

/// Clamp negatives to zero and renormalize.
inline Distribution normalize_clamped(std::span<const double> raw) {
  std::vector<double> out(raw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = raw[i] > 0.0 ? raw[i] : 0.0;
    sum += out[i];
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw DomainError("cannot normalize: no positive entries after clamping");
  }
  for (double& v : out) v /= sum;
  return Distribution(std::move(out));
}

inline Distribution normalize_clamped(const std::vector<double>& raw) {
  return normalize_clamped(std::span<const double>(raw));
}

/// Joint distribution of label pairs at L1 distance r, stored symmetrized.
class PairDistribution {
 public:
  PairDistribution(SquareMatrix probs, int r) : probs_(std::move(probs)), r_(r) {
    const std::size_t k = probs_.size();
    if (k == 0) throw InvalidArgument("pair distribution must be non-empty");
    if (r < 0) throw InvalidArgument("distance r must be non-negative");
    double sum = 0.0;
    for (double p : probs_.data()) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("pair probabilities must be finite and >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      throw InvalidArgument("pair distribution sums to " + std::to_string(sum) + ", expected 1");
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const double avg = 0.5 * (probs_(i, j) + probs_(j, i));
        probs_(i, j) = avg;
        probs_(j, i) = avg;
      }
    }
  }

  std::size_t size() const { return probs_.size(); }
  int r() const { return r_; }
  double operator()(std::size_t i, std::size_t j) const { return probs_(i, j); }
  const SquareMatrix& matrix() const { return probs_; }

  bool operator==(const PairDistribution&) const = default;

 private:
  SquareMatrix probs_;
  int r_;
};

/// Region area fractions w0, w1 = 1 - w0 and the boundary-mixing probability eps_r.
class MixtureParams {
 public:
  MixtureParams(double w0, double eps_r) : w0_(w0), w1_(1.0 - w0), eps_(eps_r) {
    if (!(w0 > 0.0 && w0 < 1.0)) throw InvalidArgument("w0 must lie in (0,1), got " + std::to_string(w0));
    if (!(eps_r >= 0.0) || !std::isfinite(eps_r)) throw InvalidArgument("eps_r must be finite and >= 0");
  }

  double w0() const { return w0_; }
  double w1() const { return w1_; }
  double eps_r() const { return eps_; }
  /// w0*w1 - eps_r; the estimators need this to be non-negative.
  double margin() const { return w0_ * w1_ - eps_; }

  MixtureParams swapped() const { return MixtureParams(w1_, eps_); }

  bool operator==(const MixtureParams&) const = default;

 private:
  double w0_;
  double w1_;
  double eps_;
};

struct ModelPair {
  Distribution theta0;
  Distribution theta1;
};

struct ModelEstimate {
  MixtureParams params;
  Distribution theta0;
  Distribution theta1;
  double residual = 0.0;
};

}  // namespace twoseg
