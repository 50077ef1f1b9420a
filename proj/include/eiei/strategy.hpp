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

#ifndef EIEI_STRATEGY_HPP
#define EIEI_STRATEGY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eiei/acquisition.hpp"
#include "eiei/gp.hpp"

namespace eiei {

// Axis-aligned hyper-rectangle domain.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  int dim() const { return static_cast<int>(lower.size()); }
  double volume() const;
  Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
};

enum class PolicyKind {
  kEiMax,    // classical: evaluate where the current EI is maximal
  kEieiMin,  // evaluate where the expected future integrated EI is minimal
};

struct Policy {
  PolicyKind kind;
};

std::string policy_name(PolicyKind kind);

struct Selection {
  int index;         // candidate index
  double criterion;  // criterion value at the selected candidate
};

// Candidate attaining the maximal EI; ties break to the lowest index.
// `selectable` restricts the choice (empty = all candidates).
Selection select_next_ei(const GpPosterior& post, Threshold t, const CandidateSet& cand,
                         std::span<const int> selectable = {});

// Candidate attaining the minimal sampling criterion over the candidate
// set (the integration sample stays the full set); ties break low.
Selection select_next_eiei(const GpPosterior& post, Threshold t, const CandidateSet& cand,
                           std::span<const int> selectable = {});

struct StepDiagnostics {
  double integrated_ei;    // H'_n given the first n observations
  double criterion_value;  // criterion of the point chosen at this step (NaN at n=1)
};

// Evaluation history of one optimization run.
struct OptimizationTrace {
  Eigen::MatrixXd points;  // d x n, in evaluation order
  Eigen::VectorXd values;
  Eigen::VectorXd running_max;
  std::vector<int> candidate_indices;
  std::vector<StepDiagnostics> diagnostics;

  int size() const { return static_cast<int>(values.size()); }
};

// Objective callback: receives the candidate index and its coordinates.
using Objective = std::function<double(int, const Eigen::VectorXd&)>;

// Thrown when the objective fails mid-run; carries the evaluations made so
// far.
class ObjectiveFailure : public std::runtime_error {
 public:
  ObjectiveFailure(const std::string& what, OptimizationTrace partial)
      : std::runtime_error(what), partial_trace(std::move(partial)) {}
  OptimizationTrace partial_trace;
};

// The sequential loop: first evaluation at the domain center (snapped to
// the nearest candidate, lowest index on distance ties), then one
// policy-selected candidate per step. Observed candidates leave the
// selectable set but stay in the integration sample. Deterministic for a
// fixed seed.
OptimizationTrace run_optimization(const Objective& objective, const MaternKernel& kernel,
                                   const Box& domain, int budget, const CandidateSet& cand,
                                   Policy policy, std::uint64_t seed);

// Ground truth of one path on its grid.
struct GridTruth {
  double max_value;
  Eigen::VectorXd argmax_point;
};

struct StepErrors {
  double value_error;     // M - M_n
  double location_error;  // ||x* - x*_n||
};

// Per-step approximation errors of a trace against the grid truth. x*_n is
// the earliest trace point attaining M_n.
std::vector<StepErrors> extract_estimators(const OptimizationTrace& trace, const GridTruth& truth);

}  // namespace eiei

#endif  // EIEI_STRATEGY_HPP
