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
//
// Sampling criteria on top of a Gaussian-process posterior:
//
//   expected_improvement  E[(Y - t)+] for one Gaussian value
//   two_point_ei          E[(max(Y1, Y2) - t)+], exact via the bivariate
//                         normal CDF
//   eei                   expected future one-point EI at y after an
//                         evaluation at x_next; equals the 2-point EI of
//                         (x_next, y) minus the EI at x_next
//   eiei                  integral of eei over a candidate set (the
//                         measure-weighted Monte Carlo sum); minimizing it
//                         is the stepwise-uncertainty-reduction rule for
//                         the integrated improvement loss
//   integrated_ei         the current integrated EI, an upper bound for
//                         eiei at every probe point
//   multi_point_ei_mc     seeded Monte Carlo estimate of the r-point EI,
//                         the correctness authority for the closed forms

#ifndef EIEI_ACQUISITION_HPP
#define EIEI_ACQUISITION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "eiei/gp.hpp"

namespace eiei {

// Best observed value M_n; the improvement baseline.
struct Threshold {
  double best;
};

// Finite point set carrying a measure weight: serves both as the
// integration sample for the criterion integral and as the search set for
// argmax/argmin. weight per point = total_measure / size.
class CandidateSet {
 public:
  // points: d x m, one column per candidate; total_measure > 0.
  CandidateSet(Eigen::MatrixXd points, double total_measure);

  int size() const { return static_cast<int>(points_.cols()); }
  int dim() const { return static_cast<int>(points_.rows()); }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::MatrixXd::ConstColXpr point(int i) const { return points_.col(i); }
  double total_measure() const { return total_measure_; }
  double weight() const { return total_measure_ / size(); }

 private:
  Eigen::MatrixXd points_;
  double total_measure_;
};

// Bivariate Gaussian law (mean, covariance) of two process values.
struct Gaussian2 {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

struct McEstimate {
  double estimate;
  double std_error;
};

/// One-point EI: (mean-t) Phi(u) + sd phi(u), u = (mean-t)/sd; the positive
/// part (mean-t)+ when sd = 0. sd < 0 raises std::domain_error.
double expected_improvement(double mean, double sd, Threshold t);

/// Exact E[(max(Y1,Y2) - t)+] for (Y1,Y2) ~ law. Symmetric under component
/// swap; degenerate components and perfectly correlated pairs reduce to
/// analytic limits instead of quadrature. Covariances that fail symmetry or
/// positive semidefiniteness beyond tolerance raise std::domain_error.
double two_point_ei(const Gaussian2& law, Threshold t);

/// Expected future EI at y given the next evaluation is at x_next.
double eei(const GpPosterior& post, Threshold t, const Eigen::Ref<const Eigen::VectorXd>& x_next,
           const Eigen::Ref<const Eigen::VectorXd>& y);

/// The sampling criterion: measure-weighted sum of eei over the candidate
/// set.
double eiei(const GpPosterior& post, Threshold t, const Eigen::Ref<const Eigen::VectorXd>& x_next,
            const CandidateSet& cand);

/// Current integrated EI (the uncertainty measure the criterion reduces):
/// measure-weighted sum of one-point EI over the candidate set.
double integrated_ei(const GpPosterior& post, Threshold t, const CandidateSet& cand);

/// Monte Carlo estimate of E[(max(Y1..Yr) - t)+] with its standard error,
/// deterministic per seed. cov must be symmetric PSD up to tolerance.
McEstimate multi_point_ei_mc(const Eigen::Ref<const Eigen::VectorXd>& means,
                             const Eigen::Ref<const Eigen::MatrixXd>& cov, Threshold t,
                             std::int64_t n_samples, std::uint64_t seed);

// Batched forms used by the selection loop and the diagnostics commands.
// Evaluations share one posterior target cache; results are indexed like
// the inputs, so parallel callers can reduce deterministically.

/// One-point EI at every candidate (interpolation-noise sd clamp applied).
std::vector<double> ei_profile(const GpPosterior& post, Threshold t, const CandidateSet& cand);

/// eiei at each cand.point(i) for i in `probes` (empty = all candidates);
/// the integration sample is always the full candidate set.
std::vector<double> eiei_profile(const GpPosterior& post, Threshold t, const CandidateSet& cand,
                                 std::span<const int> probes = {});

namespace detail {
// Treat interpolation-level posterior variance as exactly zero: phantom
// improvement at (numerically) known points must not steer the criteria.
double clamped_sd(double var, double sigma2, double jitter);
}  // namespace detail

}  // namespace eiei

#endif  // EIEI_ACQUISITION_HPP
