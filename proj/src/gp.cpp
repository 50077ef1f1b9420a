// Copyright 2026 The eiei Authors. All Rights Reserved.
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

#include "eiei/gp.hpp"

#include <cmath>
#include <stdexcept>

#include "eiei/errors.hpp"
#include "eiei/rng.hpp"

namespace eiei {

namespace {

constexpr double kJitterStart = 1e-12;  // relative to sigma2
constexpr double kJitterMax = 1e-6;

// Appends row i to a lower-triangular Cholesky factor whose leading i x i
// block is valid: one forward solve plus a pivot. Batch factorization and
// rank-1 posterior updates both go through here, so a chain of updates
// reproduces a batch refit bit for bit.
bool cholesky_append_row(Eigen::MatrixXd& chol, int i, Eigen::VectorXd gram_col,
                         double gram_diag) {
  chol.topLeftCorner(i, i).triangularView<Eigen::Lower>().solveInPlace(gram_col);
  const double pivot2 = gram_diag - gram_col.squaredNorm();
  if (!(pivot2 > 0.0)) {
    return false;
  }
  chol.row(i).head(i) = gram_col.transpose();
  chol.row(i).tail(chol.cols() - i).setZero();
  chol(i, i) = std::sqrt(pivot2);
  return true;
}

bool try_factor(const MaternKernel& kernel, const Design& design, double jitter,
                Eigen::MatrixXd& chol) {
  const int n = design.size();
  chol.resize(n, n);
  Eigen::VectorXd col(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      col(j) = kernel(design.point(j), design.point(i));
    }
    if (!cholesky_append_row(chol, i, col.head(i), kernel.sigma2() + jitter)) {
      return false;
    }
  }
  return true;
}

// Factorization with the escalating jitter ladder; returns the factor and
// the jitter that succeeded.
std::pair<Eigen::MatrixXd, double> factor_with_ladder(const MaternKernel& kernel,
                                                      const Design& design) {
  double jitter = kJitterStart * kernel.sigma2();
  const double jitter_cap = kJitterMax * kernel.sigma2();
  Eigen::MatrixXd chol;
  while (true) {
    if (try_factor(kernel, design, jitter, chol)) {
      return {std::move(chol), jitter};
    }
    if (jitter >= jitter_cap) {
      throw SingularModelError("gp: covariance factorization failed at jitter cap");
    }
    jitter *= 10.0;
  }
}

}  // namespace

MaternKernel::MaternKernel(double sigma2, double beta, MaternSmoothness nu)
    : sigma2_(sigma2),
      beta_(beta),
      nu_(nu),
      half_integer_(nu.is_half_integer()),
      scale_(2.0 * std::sqrt(nu.value()) / beta),
      poly_(half_integer_ ? nu.half_integer_p() : 0) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("MaternKernel: sigma2 must be positive");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("MaternKernel: beta must be positive");
  }
}

double MaternKernel::correlation_at_distance(double dist) const {
  if (half_integer_) {
    return poly_.at_scaled(dist * scale_);
  }
  return matern_correlation(dist / beta_, nu_);
}

double MaternKernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (x.size() != y.size()) {
    throw std::invalid_argument("MaternKernel: dimension mismatch");
  }
  return sigma2_ * correlation_at_distance((x - y).norm());
}

Design::Design(Eigen::MatrixXd points) : points_(std::move(points)) {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (points_.col(i) == points_.col(j)) {
        throw std::invalid_argument("Design: duplicate points are not allowed");
      }
    }
  }
}

Design Design::empty(int dim) { return Design(Eigen::MatrixXd(dim, 0)); }

bool Design::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  for (int i = 0; i < size(); ++i) {
    if (points_.col(i) == x) {
      return true;
    }
  }
  return false;
}

GpPosterior::GpPosterior(MaternKernel kernel, Design design, Eigen::VectorXd values)
    : kernel_(std::move(kernel)), design_(std::move(design)), values_(std::move(values)) {
  if (values_.size() != design_.size()) {
    throw std::invalid_argument("GpPosterior: values/design size mismatch");
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("GpPosterior: non-finite observation");
  }
  if (design_.size() == 0) {
    chol_.resize(0, 0);
    alpha_.resize(0);
    return;
  }
  auto [chol, jitter] = factor_with_ladder(kernel_, design_);
  chol_ = std::move(chol);
  jitter_ = jitter;
  solve_alpha();
}

GpPosterior::GpPosterior(MaternKernel kernel, Design design, Eigen::VectorXd values,
                         Eigen::MatrixXd chol, double jitter)
    : kernel_(std::move(kernel)),
      design_(std::move(design)),
      values_(std::move(values)),
      chol_(std::move(chol)),
      jitter_(jitter) {
  solve_alpha();
}

void GpPosterior::solve_alpha() {
  alpha_ = chol_.triangularView<Eigen::Lower>().solve(values_);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

// Covariance vector between the design and a target. The regularization
// lives in the model: a target that coincides exactly with a design point
// picks up the jittered diagonal entry, so conditioning reproduces the
// stored observation (and zero variance there) at any conditioning level.
Eigen::VectorXd GpPosterior::cross_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const int n = size();
  Eigen::VectorXd kx(n);
  for (int i = 0; i < n; ++i) {
    kx(i) = kernel_(design_.point(i), x);
    if (design_.point(i) == x) {
      kx(i) += jitter_;
    }
  }
  return kx;
}

double GpPosterior::mean_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (size() == 0) {
    return 0.0;
  }
  return cross_vector(x).dot(alpha_);
}

double GpPosterior::var_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (size() == 0) {
    return kernel_.sigma2();
  }
  Eigen::VectorXd kx = cross_vector(x);
  chol_.triangularView<Eigen::Lower>().solveInPlace(kx);
  return std::max(0.0, kernel_.sigma2() - kx.squaredNorm());
}

GpPosterior::TargetCache GpPosterior::cache_targets(
    const Eigen::Ref<const Eigen::MatrixXd>& targets) const {
  if (targets.cols() < 1) {
    throw std::invalid_argument("GpPosterior: empty target set");
  }
  if (targets.rows() != dim()) {
    throw std::invalid_argument("GpPosterior: target dimension mismatch");
  }
  const int n = size();
  const int m = static_cast<int>(targets.cols());
  TargetCache cache;
  cache.targets = targets;
  cache.mean.resize(m);
  cache.var.resize(m);
  cache.half.resize(n, m);
  for (int j = 0; j < m; ++j) {
    cache.half.col(j) = cross_vector(targets.col(j));
  }
  if (n > 0) {
    cache.mean = cache.half.transpose() * alpha_;
    chol_.triangularView<Eigen::Lower>().solveInPlace(cache.half);
    for (int j = 0; j < m; ++j) {
      cache.var(j) = std::max(0.0, kernel_.sigma2() - cache.half.col(j).squaredNorm());
    }
  } else {
    cache.mean.setZero();
    cache.var.setConstant(kernel_.sigma2());
  }
  return cache;
}

double GpPosterior::cross_cov(const TargetCache& a, int i, const TargetCache& b, int j) const {
  const double prior = kernel_(a.targets.col(i), b.targets.col(j));
  if (size() == 0) {
    return prior;
  }
  return prior - a.half.col(i).dot(b.half.col(j));
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> GpPosterior::mean_cov(
    const Eigen::Ref<const Eigen::MatrixXd>& targets) const {
  const TargetCache cache = cache_targets(targets);
  const int m = static_cast<int>(targets.cols());
  Eigen::MatrixXd cov(m, m);
  for (int j = 0; j < m; ++j) {
    cov(j, j) = cache.var(j);
    for (int i = j + 1; i < m; ++i) {
      const double v = cross_cov(cache, i, cache, j);
      cov(i, j) = v;
      cov(j, i) = v;
    }
  }
  return {cache.mean, cov};
}

GpPosterior GpPosterior::update(const Eigen::Ref<const Eigen::VectorXd>& x_new,
                                double v_new) const {
  if (x_new.size() != dim()) {
    throw std::invalid_argument("GpPosterior::update: dimension mismatch");
  }
  if (design_.contains(x_new)) {
    throw std::invalid_argument("GpPosterior::update: point already in design");
  }
  if (!std::isfinite(v_new)) {
    throw std::invalid_argument("GpPosterior::update: non-finite observation");
  }
  const int n = size();
  Eigen::MatrixXd pts(x_new.size(), n + 1);
  pts.leftCols(n) = design_.points();
  pts.col(n) = x_new;
  Eigen::VectorXd vals(n + 1);
  vals.head(n) = values_;
  vals(n) = v_new;

  if (n == 0) {
    return GpPosterior(kernel_, Design(std::move(pts)), std::move(vals));
  }

  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) {
    c(i) = kernel_(design_.point(i), x_new);
  }
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(n + 1, n + 1);
  chol.topLeftCorner(n, n) = chol_;
  if (cholesky_append_row(chol, n, std::move(c), kernel_.sigma2() + jitter_)) {
    return GpPosterior(kernel_, Design(std::move(pts)), std::move(vals), std::move(chol), jitter_);
  }
  // Extension lost positivity: refit the whole factor (the ladder restarts
  // and may settle on a larger jitter).
  return GpPosterior(kernel_, Design(std::move(pts)), std::move(vals));
}

Eigen::MatrixXd sample_paths(const MaternKernel& kernel, const Design& grid, int n_paths,
                             std::uint64_t seed) {
  if (n_paths < 0) {
    throw std::invalid_argument("sample_paths: n_paths must be >= 0");
  }
  const int m = grid.size();
  if (n_paths == 0) {
    return Eigen::MatrixXd(0, m);
  }
  auto [chol, jitter] = factor_with_ladder(kernel, grid);
  (void)jitter;
  NormalSampler rng(seed);
  Eigen::MatrixXd paths(n_paths, m);
  Eigen::VectorXd z(m);
  for (int p = 0; p < n_paths; ++p) {
    for (int i = 0; i < m; ++i) {
      z(i) = rng.normal();
    }
    paths.row(p) = (chol.triangularView<Eigen::Lower>() * z).transpose();
  }
  return paths;
}

}  // namespace eiei
