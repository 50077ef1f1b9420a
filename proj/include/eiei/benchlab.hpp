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
// Testbed generation and benchmark execution: simulate process sample
// paths on a finite grid, race the sampling policies on every path, and
// aggregate per-step approximation errors into mean curves.

#ifndef EIEI_BENCHLAB_HPP
#define EIEI_BENCHLAB_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eiei/gp.hpp"
#include "eiei/strategy.hpp"

namespace eiei {

/// Length scale tied to dimension so that a correlation ball occupies a
/// fixed fraction of the unit cube: (0.04 Gamma(d/2+1) / pi^(d/2))^(1/d).
double beta_from_dimension(int d);

enum class GridScheme {
  kUniformRandom,  // seeded i.i.d. uniform points in the box
  kRegular,        // k^d lattice including the box corners (requires m = k^d)
};

// Candidate/grid generator shared by the testbed and the CLI commands.
Eigen::MatrixXd make_grid(const Box& box, int m, GridScheme scheme, std::uint64_t seed);

struct TestbedConfig {
  int dim;
  int grid_size;
  int n_paths;
  double sigma2;
  double beta;  // <= 0 selects beta_from_dimension(dim)
  double nu;
  int budget;
  std::uint64_t seed;
  GridScheme scheme = GridScheme::kUniformRandom;

  void validate() const;
  MaternKernel kernel() const;
};

struct PathTruth {
  double max_value;
  int argmax_index;  // lowest index on exact ties
};

struct Testbed {
  TestbedConfig config;
  Eigen::MatrixXd grid;   // d x m
  Eigen::MatrixXd paths;  // n_paths x m
  std::vector<PathTruth> truths;

  GridTruth truth_of(int path_id) const;
};

Testbed generate_testbed(const TestbedConfig& config);

struct BenchmarkRecord {
  int path_id;
  PolicyKind strategy;
  int n;  // 1-based step
  double value_error;
  double location_error;
};

struct RunFailure {
  int path_id;
  PolicyKind strategy;
  std::string message;
};

struct BenchmarkResult {
  std::vector<BenchmarkRecord> records;
  std::vector<RunFailure> failures;
};

// One optimization run per (path, strategy), parallel across paths with
// per-path derived seeds; record order is (path_id, strategy, n) regardless
// of thread count. Throws BenchmarkError when more than 1% of runs fail.
BenchmarkResult run_benchmark(const Testbed& testbed, std::span<const Policy> strategies,
                              int budget, int n_threads);

struct AggregateRow {
  PolicyKind strategy;
  int n;
  double mean_value_error;
  double se_value_error;
  double mean_location_error;
  double se_location_error;
};

// Mean error curves with standard errors, one row per (strategy, n).
// Requires a balanced record set (same paths at every step of a strategy).
std::vector<AggregateRow> aggregate(const std::vector<BenchmarkRecord>& records);

// The one-dimensional demo objective on [-1, 1]: a quadratic bowl plus a
// wide and a narrow Gaussian-like bump.
double demo_function_1d(double x);

namespace csv {

// Shortest decimal digits that round-trip a double (%.17g).
std::string format17(double v);

void write_records(std::ostream& os, const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> read_records(std::istream& is);
void write_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows);

}  // namespace csv

}  // namespace eiei

#endif  // EIEI_BENCHLAB_HPP
