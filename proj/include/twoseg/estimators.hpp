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

// Recovery of the two appearance models (theta0, theta1) from the image
// statistics (alpha, beta) without a segmentation.
//
// Under the two-region model
//
//   alpha               = w0 theta0 + w1 theta1
//   beta - alpha alpha' = (w0 w1 - eps_r) (theta0 - theta1)(theta0 - theta1)'
//
// so the diagonal of beta - alpha alpha' fixes |theta0(i) - theta1(i)| and
// any off-diagonal entry becomes linear in the unknowns once one index is
// solved. The algebraic solvers exploit that; the spectral solver reads
// theta0 - theta1 off the dominant eigenpair. Region fractions are found by
// a grid search over w0 that keeps the model whose predicted beta is closest
// to the measured one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "twoseg/core.hpp"
#include "twoseg/rng.hpp"
#include "twoseg/stats.hpp"

namespace twoseg {

/// Values of beta(i,i) - alpha(i)^2 in [-kDiscriminantTolerance, 0) count as zero.
inline constexpr double kDiscriminantTolerance = 1e-12;

enum class Method { kAlgebraic, kSpectral };

inline std::string to_string(Method m) { return m == Method::kAlgebraic ? "algebraic" : "spectral"; }

inline Method method_from_string(const std::string& s) {
  if (s == "algebraic") return Method::kAlgebraic;
  if (s == "spectral") return Method::kSpectral;
  throw InvalidArgument("unknown method '" + s + "' (expected algebraic or spectral)");
}

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
};

struct PowerIterationOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 0;
};

/// {0.05, 0.10, ..., 0.95}.
inline std::vector<double> default_w0_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(0.05 * i);
  return g;
}

struct SearchConfig {
  std::vector<double> w0_grid = default_w0_grid();
  double rho = 0.03;
  double kappa = 0.47;
  Method method = Method::kSpectral;

  void validate() const {
    if (w0_grid.empty()) throw InvalidArgument("w0 grid must not be empty");
    for (std::size_t i = 0; i < w0_grid.size(); ++i) {
      if (!(w0_grid[i] > 0.0 && w0_grid[i] < 1.0)) throw InvalidArgument("w0 grid values must lie in (0,1)");
      if (i > 0 && !(w0_grid[i] > w0_grid[i - 1])) throw InvalidArgument("w0 grid must be strictly increasing");
    }
    if (!(rho >= 0.0)) throw InvalidArgument("rho must be >= 0");
    if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  }
};

namespace detail {

inline std::vector<double> diagonal_excess(const Distribution& alpha, const PairDistribution& beta) {
  if (alpha.size() != beta.size()) throw InvalidArgument("alpha and beta sizes differ");
  std::vector<double> d(alpha.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = beta(i, i) - alpha[i] * alpha[i];
  return d;
}

inline double checked_discriminant(double d, std::size_t index) {
  if (d < -kDiscriminantTolerance) {
    throw DomainError("beta(i,i) - alpha(i)^2 = " + std::to_string(d) + " < 0 at label " + std::to_string(index) +
                      ": condition w0*w1 >= eps_r violated by data");
  }
  return std::max(d, 0.0);
}

inline double checked_margin(const MixtureParams& p) {
  if (!(p.margin() > 0.0)) {
    throw DomainError("w0*w1 <= eps_r (w0=" + std::to_string(p.w0()) + ", eps_r=" + std::to_string(p.eps_r()) +
                      "): estimator undefined");
  }
  return p.margin();
}

/// Solves the pivot entry from its diagonal constraint, taking the + branch.
inline std::pair<double, double> solve_pivot_entry(double alpha_i, double discriminant, const MixtureParams& p) {
  const double margin = checked_margin(p);
  const double t0 = alpha_i + std::sqrt(discriminant) * p.w1() / std::sqrt(margin);
  const double t1 = (alpha_i - p.w0() * t0) / p.w1();
  return {t0, t1};
}

/// Coefficients of the constraint beta(i,j) = a * theta0(j) + b * theta1(j)
/// given the already solved entry i.
inline std::pair<double, double> pair_coefficients(double t0i, double t1i, const MixtureParams& p) {
  const double eps = p.eps_r();
  return {(p.w0() - eps) * t0i + eps * t1i, (p.w1() - eps) * t1i + eps * t0i};
}

/// Linear least squares with two unknowns via Gram-Schmidt QR (with one
/// reorthogonalization pass). Returns nullopt when the columns are dependent.
inline std::optional<std::pair<double, double>> least_squares_2(const std::vector<double>& a,
                                                                const std::vector<double>& b,
                                                                const std::vector<double>& y) {
  const std::size_t n = a.size();
  auto dot = [n](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
  };
  const double r11 = std::sqrt(dot(a, a));
  if (!(r11 > 0.0)) return std::nullopt;
  std::vector<double> q1(n);
  for (std::size_t i = 0; i < n; ++i) q1[i] = a[i] / r11;
  double r12 = dot(q1, b);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = b[i] - r12 * q1[i];
  const double c = dot(q1, u);
  for (std::size_t i = 0; i < n; ++i) u[i] -= c * q1[i];
  r12 += c;
  const double r22 = std::sqrt(dot(u, u));
  if (!(r22 > 1e-14 * std::max(r11, std::sqrt(dot(b, b))))) return std::nullopt;
  const double x1 = dot(u, y) / (r22 * r22);
  const double x0 = (dot(q1, y) - r12 * x1) / r11;
  return std::pair{x0, x1};
}

inline double negative_mass(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::max(-x, 0.0);
  return s;
}

/// Clamp and normalize a raw solution. For fixed (w0, eps_r) the data are fit
/// equally well by d = theta0 - theta1 and by -d around the same alpha; the
/// mirror is not a label swap unless w0 = w1, and only non-negativity tells
/// the two apart. The mirror is taken when it needs strictly less clamping.
inline ModelPair finish(std::vector<double> t0, std::vector<double> t1, const MixtureParams& p) {
  const std::size_t k = t0.size();
  std::vector<double> m0(k), m1(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double a = p.w0() * t0[i] + p.w1() * t1[i];
    const double d = t0[i] - t1[i];
    m0[i] = a - p.w1() * d;
    m1[i] = a + p.w0() * d;
  }
  const double own = negative_mass(t0) + negative_mass(t1);
  const double mirror = negative_mass(m0) + negative_mass(m1);
  if (mirror + 1e-15 < own) {
    t0.swap(m0);
    t1.swap(m1);
  }
  return {normalize_clamped(t0), normalize_clamped(t1)};
}

}  // namespace detail

/// Label maximizing beta(i,i) - alpha(i)^2; lowest index on ties.
inline std::size_t select_pivot(const Distribution& alpha, const PairDistribution& beta) {
  const auto d = detail::diagonal_excess(alpha, beta);
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  return best;
}

/// Minimal-constraint algebraic solver: alpha plus the diagonal entry and row
/// of beta at `pivot`.
inline ModelPair solve_minimal(const Distribution& alpha, const PairDistribution& beta, const MixtureParams& params,
                               std::size_t pivot) {
  const std::size_t k = alpha.size();
  if (beta.size() != k) throw InvalidArgument("alpha and beta sizes differ");
  if (pivot >= k) throw InvalidArgument("pivot out of range");
  const auto excess = detail::diagonal_excess(alpha, beta);
  const double disc = detail::checked_discriminant(excess[pivot], pivot);
  const auto [t0i, t1i] = detail::solve_pivot_entry(alpha[pivot], disc, params);
  const double gap = t0i - t1i;
  if (gap == 0.0) {
    const bool flat = std::all_of(excess.begin(), excess.end(), [](double d) { return d <= kDiscriminantTolerance; });
    if (flat) return {alpha, alpha};
    throw DomainError("theta0 == theta1 at pivot " + std::to_string(pivot) + ": off-diagonal solve is singular");
  }

  const double w1 = params.w1();
  const double eps = params.eps_r();
  const double denom = params.margin() * gap;
  std::vector<double> t0(k), t1(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (j == pivot) {
      t0[j] = t0i;
      t1[j] = t1i;
      continue;
    }
    t0[j] = (w1 * beta(pivot, j) - alpha[j] * (w1 * t1i + eps * gap)) / denom;
    t1[j] = (alpha[j] - params.w0() * t0[j]) / w1;
  }
  return detail::finish(std::move(t0), std::move(t1), params);
}

/// Least-squares algebraic solver using every constraint of beta.
///
/// Labels are visited in decreasing order of beta(i,i) - alpha(i)^2. The
/// first is solved from its diagonal constraint; each later label from all
/// constraints linking it to labels already solved plus its alpha
/// constraint; then one Gauss-Seidel sweep re-solves every label against all
/// k constraints. Raw (unclamped) values are carried until the final
/// clamp-and-normalize.
inline ModelPair solve_least_squares(const Distribution& alpha, const PairDistribution& beta,
                                     const MixtureParams& params) {
  const std::size_t k = alpha.size();
  if (beta.size() != k) throw InvalidArgument("alpha and beta sizes differ");
  const auto excess = detail::diagonal_excess(alpha, beta);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return excess[a] > excess[b]; });

  const std::size_t pivot = order[0];
  const double disc = detail::checked_discriminant(excess[pivot], pivot);
  if (disc <= kDiscriminantTolerance) return {alpha, alpha};
  std::vector<double> t0(k, 0.0), t1(k, 0.0);
  std::tie(t0[pivot], t1[pivot]) = detail::solve_pivot_entry(alpha[pivot], disc, params);

  std::vector<double> ca, cb, y;
  ca.reserve(k);
  cb.reserve(k);
  y.reserve(k);
  auto solve_entry = [&](std::size_t j, auto&& known_indices) {
    ca.clear();
    cb.clear();
    y.clear();
    for (std::size_t i : known_indices) {
      const auto [a, b] = detail::pair_coefficients(t0[i], t1[i], params);
      ca.push_back(a);
      cb.push_back(b);
      y.push_back(beta(i, j));
    }
    ca.push_back(params.w0());
    cb.push_back(params.w1());
    y.push_back(alpha[j]);
    if (auto sol = detail::least_squares_2(ca, cb, y)) {
      t0[j] = sol->first;
      t1[j] = sol->second;
    }
  };

  for (std::size_t l = 1; l < k; ++l) {
    solve_entry(order[l], std::span<const std::size_t>(order.data(), l));
  }

  std::vector<std::size_t> others;
  others.reserve(k);
  for (std::size_t l = 0; l < k; ++l) {
    const std::size_t j = order[l];
    others.clear();
    for (std::size_t i = 0; i < k; ++i) {
      if (i != j) others.push_back(i);
    }
    solve_entry(j, others);
  }
  return detail::finish(std::move(t0), std::move(t1), params);
}

/// Dominant (largest magnitude) eigenpair of a symmetric matrix.
///
/// Stops once ||Mv - lambda v|| <= tol. The zero matrix returns
/// (0, initial vector). Throws DomainError when max_iter is exhausted.
inline EigenPair power_iteration(const SquareMatrix& m, const PowerIterationOptions& opts = {}) {
  const std::size_t k = m.size();
  if (k == 0) throw InvalidArgument("power iteration on an empty matrix");
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const double scale = std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))});
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale) throw InvalidArgument("power iteration requires a symmetric matrix");
    }
  }

  Rng rng(opts.seed);
  std::vector<double> v(k);
  double norm = 0.0;
  while (!(norm > 0.0)) {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (double& x : v) x /= norm;

  std::vector<double> w(k);
  for (std::size_t it = 0; it <= opts.max_iter; ++it) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto row = m.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += row[j] * v[j];
      w[i] = s;
    }
    double lambda = 0.0;
    for (std::size_t i = 0; i < k; ++i) lambda += v[i] * w[i];
    double res = 0.0;
    double wn = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double e = w[i] - lambda * v[i];
      res += e * e;
      wn += w[i] * w[i];
    }
    if (std::sqrt(res) <= opts.tol) return {lambda, v};
    wn = std::sqrt(wn);
    for (std::size_t i = 0; i < k; ++i) v[i] = w[i] / wn;
  }
  throw DomainError("power iteration did not converge in " + std::to_string(opts.max_iter) + " iterations");
}

/// Spectral split from a precomputed dominant eigenpair of beta - alpha alpha'.
/// d is signed so theta0 > theta1 where |d| peaks.
inline ModelPair solve_spectral(const Distribution& alpha, const EigenPair& eig, const MixtureParams& params) {
  const std::size_t k = alpha.size();
  if (eig.vector.size() != k) throw InvalidArgument("eigenvector length differs from alpha");
  if (eig.value < -kDiscriminantTolerance) {
    throw DomainError("dominant eigenvalue " + std::to_string(eig.value) +
                      " of beta - alpha alpha^T is negative: condition w0*w1 >= eps_r violated by data");
  }
  const double margin = detail::checked_margin(params);
  const double scale = std::sqrt(std::max(eig.value, 0.0) / margin);
  std::vector<double> d(k);
  std::size_t lead = 0;
  for (std::size_t i = 0; i < k; ++i) {
    d[i] = scale * eig.vector[i];
    if (std::abs(d[i]) > std::abs(d[lead])) lead = i;
  }
  if (d[lead] < 0.0) {
    for (double& x : d) x = -x;
  }
  std::vector<double> t0(k), t1(k);
  for (std::size_t i = 0; i < k; ++i) {
    t0[i] = alpha[i] + params.w1() * d[i];
    t1[i] = alpha[i] - params.w0() * d[i];
  }
  return detail::finish(std::move(t0), std::move(t1), params);
}

inline EigenPair dominant_residual_eigenpair(const Distribution& alpha, const PairDistribution& beta,
                                             const PowerIterationOptions& opts = {}) {
  return power_iteration(rank_one_residual(alpha, beta), opts);
}

inline ModelPair solve_spectral(const Distribution& alpha, const PairDistribution& beta, const MixtureParams& params) {
  return solve_spectral(alpha, dominant_residual_eigenpair(alpha, beta), params);
}

/// eps_r = kappa * rho.
inline double epsilon_from_rho(double rho, double kappa) {
  if (!(rho >= 0.0)) throw InvalidArgument("rho must be >= 0");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be > 0");
  return kappa * rho;
}

/// r = round(rho * sqrt(|Omega|)).
inline int radius_from_rho(double rho, const LabelImage& img) {
  const double raw = rho * std::sqrt(static_cast<double>(img.pixel_count()));
  if (!(raw >= 0.5)) {
    throw InvalidArgument("rho*sqrt(|Omega|) = " + std::to_string(raw) + " rounds to r < 1");
  }
  const auto r = static_cast<long>(std::lround(raw));
  const auto limit = static_cast<long>(std::min(img.width(), img.height())) - 1;
  if (r > limit) {
    throw InvalidArgument("r = " + std::to_string(r) + " exceeds min(width,height)-1 = " + std::to_string(limit));
  }
  return static_cast<int>(std::max(r, 1L));
}

inline ModelPair estimate_models(const Distribution& alpha, const PairDistribution& beta, const MixtureParams& params,
                                 Method method) {
  return method == Method::kAlgebraic ? solve_least_squares(alpha, beta, params)
                                      : solve_spectral(alpha, beta, params);
}

/// Grid search over w0 with eps_r = kappa * rho, scoring each candidate by the
/// Frobenius distance between its predicted beta and beta_hat. The first grid
/// point wins ties (differences below 1e-14 ||beta_hat|| are ties).
inline ModelEstimate search_w0(const Distribution& alpha, const PairDistribution& beta, const SearchConfig& config) {
  config.validate();
  const double eps = epsilon_from_rho(config.rho, config.kappa);

  std::optional<EigenPair> eig;
  if (config.method == Method::kSpectral) eig = dominant_residual_eigenpair(alpha, beta);

  // Residuals closer than rounding noise count as ties.
  const double tie = 1e-14 * beta.matrix().frobenius_norm();
  std::optional<ModelEstimate> best;
  std::string last_failure;
  for (double w0 : config.w0_grid) {
    if (!(w0 * (1.0 - w0) > eps)) continue;
    const MixtureParams params(w0, eps);
    try {
      ModelPair models = eig ? solve_spectral(alpha, *eig, params) : solve_least_squares(alpha, beta, params);
      const auto predicted = compose_beta(params, models.theta0, models.theta1, beta.r());
      const double residual = (predicted.matrix() - beta.matrix()).frobenius_norm();
      if (!best || residual < best->residual - tie) {
        best = ModelEstimate{params, std::move(models.theta0), std::move(models.theta1), residual};
      }
    } catch (const DomainError& e) {
      last_failure = e.what();
    }
  }
  if (!best) {
    if (!last_failure.empty()) throw DomainError(last_failure);
    throw DomainError("w0*w1 < eps_r for entire grid (eps_r = " + std::to_string(eps) + ")");
  }
  return *best;
}

struct ImageEstimate {
  ModelEstimate estimate;
  int r = 0;
};

/// End-to-end estimate from an image: r from rho, exhaustive beta_hat, and
/// alpha taken as beta_hat's pair marginal so the two statistics describe the
/// same pixel population.
inline ImageEstimate estimate_image(const LabelImage& img, const SearchConfig& config) {
  const int r = radius_from_rho(config.rho, img);
  const auto beta = estimate_beta(img, r);
  return {search_w0(pair_marginal(beta), beta, config), r};
}

}  // namespace twoseg
