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

#include "eiei/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace eiei {

namespace {

// Lowest-index argmin/argmax over values addressed by `indices`.
Selection pick(const std::vector<double>& values, std::span<const int> indices, bool maximize) {
  int best_idx = indices[0];
  double best = values[0];
  for (std::size_t k = 1; k < indices.size(); ++k) {
    const double v = values[k];
    if (maximize ? (v > best) : (v < best)) {
      best = v;
      best_idx = indices[k];
    }
  }
  return {best_idx, best};
}

std::vector<int> all_indices(int n) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

int snap_to_candidates(const Eigen::VectorXd& x, const CandidateSet& cand) {
  int best = 0;
  double best_d2 = (cand.point(0) - x).squaredNorm();
  for (int i = 1; i < cand.size(); ++i) {
    const double d2 = (cand.point(i) - x).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

}  // namespace

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw std::invalid_argument("Box: bound dimension mismatch");
  }
  if (((upper - lower).array() <= 0.0).any()) {
    throw std::invalid_argument("Box: upper must exceed lower in every coordinate");
  }
}

double Box::volume() const { return (upper - lower).prod(); }

std::string policy_name(PolicyKind kind) {
  return kind == PolicyKind::kEiMax ? "ei" : "eiei";
}

Selection select_next_ei(const GpPosterior& post, Threshold t, const CandidateSet& cand,
                         std::span<const int> selectable) {
  const std::vector<int> all = selectable.empty() ? all_indices(cand.size()) : std::vector<int>();
  const std::span<const int> idx = selectable.empty() ? std::span<const int>(all) : selectable;
  const std::vector<double> profile = ei_profile(post, t, cand);
  std::vector<double> vals;
  vals.reserve(idx.size());
  for (const int i : idx) {
    vals.push_back(profile[static_cast<std::size_t>(i)]);
  }
  return pick(vals, idx, /*maximize=*/true);
}

Selection select_next_eiei(const GpPosterior& post, Threshold t, const CandidateSet& cand,
                           std::span<const int> selectable) {
  const std::vector<int> all = selectable.empty() ? all_indices(cand.size()) : std::vector<int>();
  const std::span<const int> idx = selectable.empty() ? std::span<const int>(all) : selectable;
  const std::vector<double> vals = eiei_profile(post, t, cand, idx);
  return pick(vals, idx, /*maximize=*/false);
}

OptimizationTrace run_optimization(const Objective& objective, const MaternKernel& kernel,
                                   const Box& domain, int budget, const CandidateSet& cand,
                                   Policy policy, std::uint64_t seed) {
  (void)seed;  // criteria are deterministic sums over the candidate set
  if (budget < 1) {
    throw std::invalid_argument("run_optimization: budget must be >= 1");
  }
  if (budget > cand.size()) {
    throw std::invalid_argument("run_optimization: budget exceeds candidate count");
  }
  if (domain.dim() != cand.dim()) {
    throw std::invalid_argument("run_optimization: domain/candidate dimension mismatch");
  }

  OptimizationTrace trace;
  trace.points.resize(cand.dim(), budget);
  trace.values.resize(budget);
  trace.running_max.resize(budget);
  trace.candidate_indices.reserve(static_cast<std::size_t>(budget));
  trace.diagnostics.reserve(static_cast<std::size_t>(budget));

  std::vector<char> observed(static_cast<std::size_t>(cand.size()), 0);

  auto evaluate = [&](int cand_idx, int step, double criterion) {
    if (observed[static_cast<std::size_t>(cand_idx)]) {
      throw std::logic_error("run_optimization: policy selected an observed point");
    }
    const Eigen::VectorXd x = cand.point(cand_idx);
    double value = 0.0;
    try {
      value = objective(cand_idx, x);
    } catch (const std::exception& e) {
      // abort with the evaluations made so far
      trace.points.conservativeResize(Eigen::NoChange, step);
      trace.values.conservativeResize(step);
      trace.running_max.conservativeResize(step);
      throw ObjectiveFailure(std::string("objective failed: ") + e.what(), trace);
    }
    if (!std::isfinite(value)) {
      trace.points.conservativeResize(Eigen::NoChange, step);
      trace.values.conservativeResize(step);
      trace.running_max.conservativeResize(step);
      throw ObjectiveFailure("objective returned a non-finite value", trace);
    }
    observed[static_cast<std::size_t>(cand_idx)] = 1;
    trace.points.col(step) = x;
    trace.values(step) = value;
    trace.running_max(step) = step == 0 ? value : std::max(trace.running_max(step - 1), value);
    trace.candidate_indices.push_back(cand_idx);
    trace.diagnostics.push_back({std::numeric_limits<double>::quiet_NaN(), criterion});
    return value;
  };

  const int start = snap_to_candidates(domain.center(), cand);
  evaluate(start, 0, std::numeric_limits<double>::quiet_NaN());

  GpPosterior post(kernel, Design(trace.points.col(0)), trace.values.head(1));
  trace.diagnostics[0].integrated_ei =
      integrated_ei(post, Threshold{trace.running_max(0)}, cand);

  for (int step = 1; step < budget; ++step) {
    std::vector<int> selectable;
    selectable.reserve(static_cast<std::size_t>(cand.size()));
    for (int i = 0; i < cand.size(); ++i) {
      if (!observed[static_cast<std::size_t>(i)]) {
        selectable.push_back(i);
      }
    }
    const Threshold t{trace.running_max(step - 1)};
    const Selection sel = policy.kind == PolicyKind::kEiMax
                              ? select_next_ei(post, t, cand, selectable)
                              : select_next_eiei(post, t, cand, selectable);
    const double value = evaluate(sel.index, step, sel.criterion);
    post = post.update(cand.point(sel.index), value);
    trace.diagnostics[static_cast<std::size_t>(step)].integrated_ei =
        integrated_ei(post, Threshold{trace.running_max(step)}, cand);
  }
  return trace;
}

std::vector<StepErrors> extract_estimators(const OptimizationTrace& trace,
                                           const GridTruth& truth) {
  const int n = trace.size();
  if (n == 0) {
    return {};
  }
  if (truth.argmax_point.size() != trace.points.rows()) {
    throw std::invalid_argument("extract_estimators: dimension mismatch");
  }
  if (trace.values.maxCoeff() > truth.max_value + 1e-9) {
    throw std::invalid_argument("extract_estimators: trace exceeds claimed maximum");
  }
  std::vector<StepErrors> out(static_cast<std::size_t>(n));
  int best_idx = 0;
  for (int i = 0; i < n; ++i) {
    if (trace.values(i) > trace.values(best_idx)) {
      best_idx = i;
    }
    out[static_cast<std::size_t>(i)].value_error =
        std::max(0.0, truth.max_value - trace.values(best_idx));
    out[static_cast<std::size_t>(i)].location_error =
        (truth.argmax_point - trace.points.col(best_idx)).norm();
  }
  return out;
}

}  // namespace eiei
