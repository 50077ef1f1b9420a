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

#include "eiei/acquisition.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eiei/rng.hpp"
#include "eiei/special_math.hpp"

namespace eiei {

namespace {

// Correlations this close to +/-1 take the analytic limit instead of the
// quadrature path (candidates adjacent to the probe point hit this every
// step).
constexpr double kCorrDegenerate = 1e-8;

// Phi2(a, b, rho) with the near-degenerate correlation handled analytically.
double phi2_guarded(double a, double b, double rho) {
  if (rho >= 1.0 - kCorrDegenerate) {
    return std_normal_cdf(std::min(a, b));
  }
  if (rho <= -1.0 + kCorrDegenerate) {
    return std::max(0.0, std_normal_cdf(a) + std_normal_cdf(b) - 1.0);
  }
  return bvn_cdf(a, b, Correlation(rho));
}

// Phi(num / sqrt(1 - rho^2)), with the step-function limit as |rho| -> 1.
double conditional_cdf(double num, double rho) {
  const double s2 = (1.0 - rho) * (1.0 + rho);
  if (s2 <= 1e-16) {
    if (num > 0.0) return 1.0;
    if (num < 0.0) return 0.0;
    return 0.5;
  }
  return std_normal_cdf(num / std::sqrt(s2));
}

// E[(max(c, Y) - t)+] for a constant c against Y ~ N(mean, sd^2).
double max_against_constant(double c, double mean, double sd, Threshold t) {
  if (c <= t.best) {
    return expected_improvement(mean, sd, t);
  }
  return (c - t.best) + expected_improvement(mean, sd, Threshold{c});
}

// One of the two symmetric halves of the exact 2-point formula:
// E[(Y_k - t) 1{Y_k >= t, Y_k >= Y_j}] for s_k > 0, tau > 0.
double two_point_term(double mk, double sk, double mj, double ckk_minus_ckj, double tau,
                      Threshold t) {
  const double a = (mk - t.best) / sk;
  const double b = (mk - mj) / tau;
  double rho = ckk_minus_ckj / (sk * tau);
  rho = std::clamp(rho, -1.0, 1.0);
  const double mean_term = (mk - t.best) * phi2_guarded(a, b, rho);
  const double own_term = sk * std_normal_pdf(a) * conditional_cdf(b - rho * a, rho);
  const double diff_term =
      (ckk_minus_ckj / tau) * std_normal_pdf(b) * conditional_cdf(a - rho * b, rho);
  return mean_term + own_term + diff_term;
}

void validate_gaussian2(const Gaussian2& law) {
  const double v1 = law.cov(0, 0);
  const double v2 = law.cov(1, 1);
  const double scale = std::max({1.0, std::fabs(v1), std::fabs(v2)});
  if (!law.mean.allFinite() || !law.cov.allFinite()) {
    throw std::domain_error("two_point_ei: non-finite law");
  }
  if (std::fabs(law.cov(0, 1) - law.cov(1, 0)) > 1e-10 * scale) {
    throw std::domain_error("two_point_ei: covariance not symmetric");
  }
  if (v1 < -1e-10 * scale || v2 < -1e-10 * scale) {
    throw std::domain_error("two_point_ei: negative variance");
  }
  const double c12 = 0.5 * (law.cov(0, 1) + law.cov(1, 0));
  const double det = v1 * v2 - c12 * c12;
  if (det < -1e-10 * scale * scale) {
    throw std::domain_error("two_point_ei: covariance not PSD");
  }
}

// Shared scan core: evaluates eiei for each probe index against the cached
// candidate set. `probe` may point into the same cache.
double eiei_from_cache(const GpPosterior& post, Threshold t, const GpPosterior::TargetCache& cands,
                       const GpPosterior::TargetCache& probe_cache, int probe_idx, double weight) {
  const double sigma2 = post.kernel().sigma2();
  const double jitter = post.jitter();
  const double mx = probe_cache.mean(probe_idx);
  const double sx = detail::clamped_sd(probe_cache.var(probe_idx), sigma2, jitter);
  const double ei_x = expected_improvement(mx, sx, t);

  double acc = 0.0;
  Gaussian2 law;
  const int m = static_cast<int>(cands.targets.cols());
  for (int i = 0; i < m; ++i) {
    const double my = cands.mean(i);
    const double sy = detail::clamped_sd(cands.var(i), sigma2, jitter);
    double cxy = post.cross_cov(probe_cache, probe_idx, cands, i);
    cxy = std::clamp(cxy, -sx * sy, sx * sy);
    law.mean << mx, my;
    law.cov << sx * sx, cxy, cxy, sy * sy;
    const double ei2 = two_point_ei(law, t);
    acc += std::max(0.0, ei2 - ei_x);
  }
  return weight * acc;
}

}  // namespace

namespace detail {

double clamped_sd(double var, double sigma2, double jitter) {
  const double floor = std::max(1e-18 * sigma2, 100.0 * jitter);
  if (var <= floor) {
    return 0.0;
  }
  return std::sqrt(var);
}

}  // namespace detail

CandidateSet::CandidateSet(Eigen::MatrixXd points, double total_measure)
    : points_(std::move(points)), total_measure_(total_measure) {
  if (points_.cols() < 1) {
    throw std::invalid_argument("CandidateSet: must be non-empty");
  }
  if (!(total_measure > 0.0) || !std::isfinite(total_measure)) {
    throw std::invalid_argument("CandidateSet: total_measure must be positive");
  }
}

double expected_improvement(double mean, double sd, Threshold t) {
  if (!(sd >= 0.0)) {
    throw std::domain_error("expected_improvement: sd must be >= 0");
  }
  const double gap = mean - t.best;
  if (sd == 0.0) {
    return std::max(0.0, gap);
  }
  const double u = gap / sd;
  return std::max(0.0, gap * std_normal_cdf(u) + sd * std_normal_pdf(u));
}

double two_point_ei(const Gaussian2& law, Threshold t) {
  validate_gaussian2(law);
  const double m1 = law.mean(0);
  const double m2 = law.mean(1);
  const double s1 = std::sqrt(std::max(0.0, law.cov(0, 0)));
  const double s2 = std::sqrt(std::max(0.0, law.cov(1, 1)));
  const double c12 = std::clamp(0.5 * (law.cov(0, 1) + law.cov(1, 0)), -s1 * s2, s1 * s2);

  if (s1 == 0.0 && s2 == 0.0) {
    return std::max(0.0, std::max(m1, m2) - t.best);
  }
  if (s1 == 0.0) {
    return max_against_constant(m1, m2, s2, t);
  }
  if (s2 == 0.0) {
    return max_against_constant(m2, m1, s1, t);
  }

  // tau^2 = Var(Y1 - Y2); the threshold matches treating component
  // correlations within 1e-8 of 1 (with equal scales) as degenerate.
  const double tau2 = s1 * s1 + s2 * s2 - 2.0 * c12;
  if (tau2 <= 2e-8 * std::max(s1 * s1, s2 * s2)) {
    // Y1 - Y2 is (numerically) an a.s. constant: the max is whichever
    // component dominates. The tie rule is swap-invariant.
    if (m1 > m2 || (m1 == m2 && s1 >= s2)) {
      return expected_improvement(m1, s1, t);
    }
    return expected_improvement(m2, s2, t);
  }
  const double tau = std::sqrt(tau2);
  const double term1 = two_point_term(m1, s1, m2, s1 * s1 - c12, tau, t);
  const double term2 = two_point_term(m2, s2, m1, s2 * s2 - c12, tau, t);
  return std::max(0.0, term1 + term2);
}

double eei(const GpPosterior& post, Threshold t, const Eigen::Ref<const Eigen::VectorXd>& x_next,
           const Eigen::Ref<const Eigen::VectorXd>& y) {
  Eigen::MatrixXd pair(x_next.size(), 2);
  pair.col(0) = x_next;
  pair.col(1) = y;
  const GpPosterior::TargetCache cache = post.cache_targets(pair);
  const double sigma2 = post.kernel().sigma2();
  const double jitter = post.jitter();

  const double mx = cache.mean(0);
  const double my = cache.mean(1);
  const double sx = detail::clamped_sd(cache.var(0), sigma2, jitter);
  const double sy = detail::clamped_sd(cache.var(1), sigma2, jitter);
  double cxy = post.cross_cov(cache, 0, cache, 1);
  cxy = std::clamp(cxy, -sx * sy, sx * sy);

  Gaussian2 law;
  law.mean << mx, my;
  law.cov << sx * sx, cxy, cxy, sy * sy;
  const double ei_x = expected_improvement(mx, sx, t);
  return std::max(0.0, two_point_ei(law, t) - ei_x);
}

double eiei(const GpPosterior& post, Threshold t, const Eigen::Ref<const Eigen::VectorXd>& x_next,
            const CandidateSet& cand) {
  const GpPosterior::TargetCache cands = post.cache_targets(cand.points());
  const GpPosterior::TargetCache probe = post.cache_targets(x_next);
  return eiei_from_cache(post, t, cands, probe, 0, cand.weight());
}

double integrated_ei(const GpPosterior& post, Threshold t, const CandidateSet& cand) {
  const std::vector<double> profile = ei_profile(post, t, cand);
  double acc = 0.0;
  for (const double v : profile) {
    acc += v;
  }
  return cand.weight() * acc;
}

std::vector<double> ei_profile(const GpPosterior& post, Threshold t, const CandidateSet& cand) {
  const GpPosterior::TargetCache cache = post.cache_targets(cand.points());
  const double sigma2 = post.kernel().sigma2();
  const double jitter = post.jitter();
  std::vector<double> out(static_cast<std::size_t>(cand.size()));
  for (int i = 0; i < cand.size(); ++i) {
    const double sd = detail::clamped_sd(cache.var(i), sigma2, jitter);
    out[static_cast<std::size_t>(i)] = expected_improvement(cache.mean(i), sd, t);
  }
  return out;
}

std::vector<double> eiei_profile(const GpPosterior& post, Threshold t, const CandidateSet& cand,
                                 std::span<const int> probes) {
  const GpPosterior::TargetCache cache = post.cache_targets(cand.points());
  const double weight = cand.weight();
  std::vector<double> out;
  if (probes.empty()) {
    out.resize(static_cast<std::size_t>(cand.size()));
    for (int i = 0; i < cand.size(); ++i) {
      out[static_cast<std::size_t>(i)] = eiei_from_cache(post, t, cache, cache, i, weight);
    }
  } else {
    out.reserve(probes.size());
    for (const int idx : probes) {
      if (idx < 0 || idx >= cand.size()) {
        throw std::out_of_range("eiei_profile: probe index out of range");
      }
      out.push_back(eiei_from_cache(post, t, cache, cache, idx, weight));
    }
  }
  return out;
}

McEstimate multi_point_ei_mc(const Eigen::Ref<const Eigen::VectorXd>& means,
                             const Eigen::Ref<const Eigen::MatrixXd>& cov, Threshold t,
                             std::int64_t n_samples, std::uint64_t seed) {
  const int r = static_cast<int>(means.size());
  if (r < 1) {
    throw std::invalid_argument("multi_point_ei_mc: need at least one component");
  }
  if (cov.rows() != r || cov.cols() != r) {
    throw std::invalid_argument("multi_point_ei_mc: covariance shape mismatch");
  }
  if (n_samples < 2) {
    throw std::invalid_argument("multi_point_ei_mc: need at least two samples");
  }
  const double scale = std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::domain_error("multi_point_ei_mc: covariance not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw std::domain_error("multi_point_ei_mc: eigendecomposition failed");
  }
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw std::domain_error("multi_point_ei_mc: covariance not PSD");
  }
  const Eigen::MatrixXd transform =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  NormalSampler rng(seed);
  Eigen::VectorXd z(r);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    for (int i = 0; i < r; ++i) {
      z(i) = rng.normal();
    }
    const double top = (means + transform * z).maxCoeff();
    const double imp = std::max(0.0, top - t.best);
    sum += imp;
    sum_sq += imp * imp;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace eiei
