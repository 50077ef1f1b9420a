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

#ifndef EIEI_GP_HPP
#define EIEI_GP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "eiei/special_math.hpp"

namespace eiei {

// Isotropic Matern covariance k(x, y) = sigma2 * r_nu(||x - y|| / beta).
// Half-integer orders (the common case) evaluate through a precomputed
// polynomial so the kernel is cheap inside O(m^2) criterion scans.
class MaternKernel {
 public:
  MaternKernel(double sigma2, double beta, MaternSmoothness nu);

  double sigma2() const { return sigma2_; }
  double beta() const { return beta_; }
  MaternSmoothness nu() const { return nu_; }

  // Correlation r_nu(dist / beta) for a Euclidean distance >= 0.
  double correlation_at_distance(double dist) const;

  // Covariance between two points of equal dimension.
  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const;

 private:
  double sigma2_;
  double beta_;
  MaternSmoothness nu_;
  bool half_integer_;
  double scale_;  // 2 sqrt(nu) / beta, maps distance to the Bessel argument
  HalfIntegerMatern poly_;
};

// An ordered set of pairwise-distinct evaluation points, stored as the
// columns of a d x n matrix.
class Design {
 public:
  // points: d x n, one column per point. Exact duplicate columns are
  // rejected (noiseless interpolation).
  explicit Design(Eigen::MatrixXd points);
  static Design empty(int dim);

  int size() const { return static_cast<int>(points_.cols()); }
  int dim() const { return static_cast<int>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::MatrixXd::ConstColXpr point(int i) const { return points_.col(i); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  Eigen::MatrixXd points_;
};

// Gaussian process conditioned on noiseless observations. Immutable;
// update() returns an extended copy. The regularized design covariance
// K + jitter*I is kept as a lower-triangular Cholesky factor.
class GpPosterior {
 public:
  // condition(): exact interpolation of (design, values). The jitter ladder
  // starts at 1e-12*sigma2 and escalates tenfold up to 1e-6*sigma2 before
  // throwing SingularModelError.
  GpPosterior(MaternKernel kernel, Design design, Eigen::VectorXd values);

  int size() const { return design_.size(); }
  int dim() const { return design_.dim(); }
  const MaternKernel& kernel() const { return kernel_; }
  const Design& design() const { return design_; }
  const Eigen::VectorXd& values() const { return values_; }
  // Diagonal regularization actually applied (0 for an empty design).
  double jitter() const { return jitter_; }

  double mean_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double var_at(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Posterior mean vector and full covariance matrix at the columns of
  // `targets` (d x m). Variances are clipped at 0 from below.
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> mean_cov(
      const Eigen::Ref<const Eigen::MatrixXd>& targets) const;

  // Rank-1 extension with one new observation. Falls back to a full refit
  // on an escalated jitter level if the extended factor loses positivity.
  GpPosterior update(const Eigen::Ref<const Eigen::VectorXd>& x_new, double v_new) const;

  // Cached per-target quantities for criterion scans: posterior means,
  // variances, and the half-solves L^{-1} K(X, t_i) that turn any pairwise
  // posterior covariance into one dot product.
  struct TargetCache {
    Eigen::MatrixXd targets;  // d x m
    Eigen::VectorXd mean;     // m
    Eigen::VectorXd var;      // m, clipped at 0
    Eigen::MatrixXd half;     // n x m
  };
  TargetCache cache_targets(const Eigen::Ref<const Eigen::MatrixXd>& targets) const;
  double cross_cov(const TargetCache& a, int i, const TargetCache& b, int j) const;

 private:
  GpPosterior(MaternKernel kernel, Design design, Eigen::VectorXd values,
              Eigen::MatrixXd chol, double jitter);
  void solve_alpha();
  Eigen::VectorXd cross_vector(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  MaternKernel kernel_;
  Design design_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd chol_;   // n x n lower triangular
  Eigen::VectorXd alpha_;  // (K + jitter I)^{-1} values
  double jitter_ = 0.0;
};

// Independent zero-mean draws of the process restricted to the grid;
// one row per path. Deterministic for a fixed seed.
Eigen::MatrixXd sample_paths(const MaternKernel& kernel, const Design& grid, int n_paths,
                             std::uint64_t seed);

}  // namespace eiei

#endif  // EIEI_GP_HPP
