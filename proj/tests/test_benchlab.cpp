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

#include "eiei/benchlab.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "eiei/errors.hpp"
#include "eiei/rng.hpp"

using eiei::aggregate;
using eiei::AggregateRow;
using eiei::BenchmarkError;
using eiei::BenchmarkRecord;
using eiei::BenchmarkResult;
using eiei::beta_from_dimension;
using eiei::Box;
using eiei::CandidateSet;
using eiei::demo_function_1d;
using eiei::Design;
using eiei::generate_testbed;
using eiei::GridScheme;
using eiei::make_grid;
using eiei::MaternKernel;
using eiei::NormalSampler;
using eiei::Objective;
using eiei::OptimizationTrace;
using eiei::Policy;
using eiei::PolicyKind;
using eiei::run_benchmark;
using eiei::run_optimization;
using eiei::Testbed;
using eiei::TestbedConfig;

namespace {

TestbedConfig small_config() {
  TestbedConfig cfg;
  cfg.dim = 2;
  cfg.grid_size = 30;
  cfg.n_paths = 3;
  cfg.sigma2 = 1.0;
  cfg.beta = 0.0;  // auto
  cfg.nu = 6.5;
  cfg.budget = 5;
  cfg.seed = 99;
  cfg.scheme = GridScheme::kUniformRandom;
  return cfg;
}

}  // namespace

TEST_CASE("beta_from_dimension") {
  // d = 3: the formula reduces to (0.03/pi)^(1/3); 40-digit evaluation
  CHECK(std::fabs(beta_from_dimension(3) - 0.21215688358941105) < 1e-12);
  CHECK(std::fabs(beta_from_dimension(3) - 0.2) <= 0.013);  // the headline approximation
  // d = 2: Gamma(2) = 1 collapses the formula to sqrt(0.04/pi)
  CHECK(beta_from_dimension(2) ==
        doctest::Approx(std::sqrt(0.04 / 3.14159265358979323846)).epsilon(1e-14));
  CHECK(beta_from_dimension(1) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(std::fabs(beta_from_dimension(5) - 0.37683592915993302) < 1e-12);
  CHECK(beta_from_dimension(4) > 0.0);
  CHECK_THROWS_AS(beta_from_dimension(0), std::invalid_argument);
}

TEST_CASE("make_grid schemes") {
  const Box box((Eigen::VectorXd(2) << 0.0, 0.0).finished(),
                (Eigen::VectorXd(2) << 1.0, 1.0).finished());
  const Eigen::MatrixXd uniform = make_grid(box, 40, GridScheme::kUniformRandom, 5);
  CHECK(uniform.rows() == 2);
  CHECK(uniform.cols() == 40);
  CHECK(uniform.minCoeff() >= 0.0);
  CHECK(uniform.maxCoeff() <= 1.0);
  CHECK(make_grid(box, 40, GridScheme::kUniformRandom, 5) == uniform);

  const Eigen::MatrixXd regular = make_grid(box, 25, GridScheme::kRegular, 0);
  CHECK(regular.cols() == 25);
  CHECK(regular.minCoeff() == 0.0);
  CHECK(regular.maxCoeff() == 1.0);
  // 24 is not a perfect square
  CHECK_THROWS_AS(make_grid(box, 24, GridScheme::kRegular, 0), std::invalid_argument);
}

TEST_CASE("generate_testbed: truth and determinism") {
  const Testbed bed = generate_testbed(small_config());
  CHECK(bed.grid.cols() == 30);
  CHECK(bed.paths.rows() == 3);
  for (int p = 0; p < 3; ++p) {
    CHECK(bed.truths[static_cast<std::size_t>(p)].max_value ==
          bed.paths.row(p).maxCoeff());
    CHECK(bed.paths(p, bed.truths[static_cast<std::size_t>(p)].argmax_index) ==
          bed.truths[static_cast<std::size_t>(p)].max_value);
  }
  const Testbed again = generate_testbed(small_config());
  CHECK(again.paths == bed.paths);
  CHECK(again.grid == bed.grid);

  TestbedConfig bad = small_config();
  bad.budget = 31;
  CHECK_THROWS_AS(generate_testbed(bad), std::invalid_argument);
}

TEST_CASE("generate_testbed: path statistics match the kernel") {
  TestbedConfig cfg = small_config();
  cfg.dim = 3;
  cfg.grid_size = 10;
  cfg.n_paths = 2000;
  cfg.budget = 5;
  const Testbed bed = generate_testbed(cfg);
  const MaternKernel kernel = cfg.kernel();
  const int n = cfg.n_paths;
  for (const auto& [i, j] : {std::pair{0, 1}, {2, 5}, {3, 8}, {4, 9}}) {
    const double kxy = kernel(bed.grid.col(i), bed.grid.col(j));
    const double mi = bed.paths.col(i).mean();
    const double mj = bed.paths.col(j).mean();
    const double cov_hat =
        ((bed.paths.col(i).array() - mi) * (bed.paths.col(j).array() - mj)).sum() / (n - 1);
    const double se = std::sqrt((kernel.sigma2() * kernel.sigma2() + kxy * kxy) / (n - 1));
    CHECK(std::fabs(cov_hat - kxy) <= 3.0 * se);
  }
}

TEST_CASE("run_benchmark: counts, budget-1, monotone value error") {
  const Testbed bed = generate_testbed(small_config());
  const Policy policies[] = {Policy{PolicyKind::kEiMax}, Policy{PolicyKind::kEieiMin}};

  const BenchmarkResult one = run_benchmark(bed, policies, 1, 1);
  CHECK(one.records.size() == 6);  // 3 paths x 2 strategies x budget 1
  for (const BenchmarkRecord& rec : one.records) {
    CHECK(rec.n == 1);
    CHECK(rec.value_error >= 0.0);
    CHECK(rec.location_error >= 0.0);
  }

  const BenchmarkResult full = run_benchmark(bed, policies, 5, 2);
  CHECK(full.records.size() == 30);
  CHECK(full.failures.empty());
  // per (path, strategy), value errors never increase with n
  for (const BenchmarkRecord& rec : full.records) {
    if (rec.n == 1) {
      continue;
    }
    const auto prev = std::find_if(full.records.begin(), full.records.end(), [&](const auto& r) {
      return r.path_id == rec.path_id && r.strategy == rec.strategy && r.n == rec.n - 1;
    });
    REQUIRE(prev != full.records.end());
    CHECK(rec.value_error <= prev->value_error + 1e-15);
  }
  // thread-count independence of the results
  const BenchmarkResult serial = run_benchmark(bed, policies, 5, 1);
  REQUIRE(serial.records.size() == full.records.size());
  for (std::size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].path_id == full.records[i].path_id);
    CHECK(serial.records[i].value_error == full.records[i].value_error);
    CHECK(serial.records[i].location_error == full.records[i].location_error);
  }
}

TEST_CASE("run_benchmark matches a manual replay of the strategy loop") {
  const Testbed bed = generate_testbed(small_config());
  const Policy policies[] = {Policy{PolicyKind::kEieiMin}};
  const BenchmarkResult result = run_benchmark(bed, policies, 5, 2);
  const Box box(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  const CandidateSet cand(bed.grid, 1.0);
  for (int p = 0; p < 3; ++p) {
    const Objective objective = [&bed, p](int idx, const Eigen::VectorXd&) {
      return bed.paths(p, idx);
    };
    const OptimizationTrace replay =
        run_optimization(objective, bed.config.kernel(), box, 5, cand,
                         Policy{PolicyKind::kEieiMin}, bed.config.seed + p);
    const auto errors = eiei::extract_estimators(replay, bed.truth_of(p));
    for (int n = 0; n < 5; ++n) {
      const auto it = std::find_if(result.records.begin(), result.records.end(),
                                   [&](const auto& r) { return r.path_id == p && r.n == n + 1; });
      REQUIRE(it != result.records.end());
      CHECK(it->value_error == errors[static_cast<std::size_t>(n)].value_error);
      CHECK(it->location_error == errors[static_cast<std::size_t>(n)].location_error);
    }
  }
}

TEST_CASE("aggregate: exact small cases") {
  // single record: the curve is that record
  const std::vector<BenchmarkRecord> one = {{0, PolicyKind::kEiMax, 1, 0.5, 0.25}};
  const std::vector<AggregateRow> single = aggregate(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].mean_value_error == 0.5);
  CHECK(single[0].se_value_error == 0.0);
  CHECK(single[0].mean_location_error == 0.25);

  // 10-record fixture against hand-computed means
  std::vector<BenchmarkRecord> fixture;
  for (int p = 0; p < 5; ++p) {
    fixture.push_back({p, PolicyKind::kEiMax, 1, 1.0 + p, 0.1 * p});
    fixture.push_back({p, PolicyKind::kEieiMin, 1, 2.0 * p, 0.2});
  }
  const std::vector<AggregateRow> rows = aggregate(fixture);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].strategy == PolicyKind::kEiMax);
  CHECK(rows[0].mean_value_error == doctest::Approx(3.0).epsilon(1e-15));      // mean 1..5
  CHECK(rows[0].mean_location_error == doctest::Approx(0.2).epsilon(1e-15));   // mean 0..0.4
  // sample sd of {1..5} is sqrt(2.5); se = sqrt(2.5/5)
  CHECK(rows[0].se_value_error == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(rows[1].strategy == PolicyKind::kEieiMin);
  CHECK(rows[1].mean_value_error == doctest::Approx(4.0).epsilon(1e-15));  // mean of 0,2,..,8
  CHECK(rows[1].se_location_error == 0.0);                                 // constant column

  // permutation invariance
  std::vector<BenchmarkRecord> shuffled = fixture;
  std::mt19937 gen(3);
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const std::vector<AggregateRow> rows2 = aggregate(shuffled);
  REQUIRE(rows2.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows2[i].mean_value_error == rows[i].mean_value_error);
    CHECK(rows2[i].se_value_error == rows[i].se_value_error);
    CHECK(rows2[i].mean_location_error == rows[i].mean_location_error);
  }

  // unbalanced set
  std::vector<BenchmarkRecord> unbalanced = fixture;
  unbalanced.push_back({7, PolicyKind::kEiMax, 2, 0.0, 0.0});
  CHECK_THROWS_AS(aggregate(unbalanced), BenchmarkError);
  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("demo function values") {
  // direct evaluation of the defining formula at 40 digits
  CHECK(std::fabs(demo_function_1d(0.0) - 0.79182954793421996) < 1e-14);
  // |x + 0.1| = 0 makes the middle term exactly 1
  const double expect = 0.28 * 0.28 + 1.0 + std::exp(-0.5 * 0.64 / 0.1) - 0.02;
  CHECK(demo_function_1d(-0.1) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(std::fabs(demo_function_1d(-0.1) - 1.0991622039783662) < 1e-14);
  CHECK_THROWS_AS(demo_function_1d(1.0001), std::domain_error);
  CHECK_THROWS_AS(demo_function_1d(-1.5), std::domain_error);
  // exhaustive scan on 2001 uniform points: golden argmax index
  int arg = 0;
  double best = -1e30;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -1.0 + 2.0 * i / 2000.0;
    const double f = demo_function_1d(x);
    if (f > best) {
      best = f;
      arg = i;
    }
  }
  CHECK(arg == 902);
  CHECK(std::fabs(best - 1.0993477034966486) < 1e-13);
}

TEST_CASE("records CSV round-trips exactly") {
  NormalSampler rng(13);
  std::vector<BenchmarkRecord> records;
  for (int p = 0; p < 4; ++p) {
    for (int n = 1; n <= 3; ++n) {
      records.push_back({p, p % 2 == 0 ? PolicyKind::kEiMax : PolicyKind::kEieiMin, n,
                         std::fabs(rng.normal()) * 1e-3, std::fabs(rng.normal())});
    }
  }
  std::stringstream ss;
  eiei::csv::write_records(ss, records);
  const std::vector<BenchmarkRecord> parsed = eiei::csv::read_records(ss);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed[i].path_id == records[i].path_id);
    CHECK(parsed[i].strategy == records[i].strategy);
    CHECK(parsed[i].n == records[i].n);
    CHECK(parsed[i].value_error == records[i].value_error);        // bit-exact
    CHECK(parsed[i].location_error == records[i].location_error);  // bit-exact
  }
  std::stringstream bad("nonsense\n1,ei,1,0,0\n");
  CHECK_THROWS_AS(eiei::csv::read_records(bad), std::invalid_argument);
}
