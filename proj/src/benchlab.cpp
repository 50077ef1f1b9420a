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

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "eiei/errors.hpp"
#include "eiei/rng.hpp"

namespace eiei {

double beta_from_dimension(int d) {
  if (d < 1) {
    throw std::invalid_argument("beta_from_dimension: d must be >= 1");
  }
  const double dd = static_cast<double>(d);
  const double log_vol = std::log(0.04) + std::lgamma(dd / 2.0 + 1.0) -
                         dd / 2.0 * std::log(3.14159265358979323846);
  return std::exp(log_vol / dd);
}

Eigen::MatrixXd make_grid(const Box& box, int m, GridScheme scheme, std::uint64_t seed) {
  if (m < 1) {
    throw std::invalid_argument("make_grid: m must be >= 1");
  }
  const int d = box.dim();
  Eigen::MatrixXd pts(d, m);
  if (scheme == GridScheme::kUniformRandom) {
    NormalSampler rng(seed);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < d; ++i) {
        pts(i, j) = box.lower(i) + (box.upper(i) - box.lower(i)) * rng.uniform();
      }
    }
    return pts;
  }
  // Regular lattice: m must be a perfect d-th power.
  int k = static_cast<int>(std::llround(std::pow(static_cast<double>(m), 1.0 / d)));
  while (k > 1 && std::pow(static_cast<double>(k), d) > m) --k;
  while (std::pow(static_cast<double>(k + 1), d) <= m) ++k;
  double total = 1.0;
  for (int i = 0; i < d; ++i) total *= k;
  if (total != static_cast<double>(m)) {
    throw std::invalid_argument("make_grid: regular scheme needs m = k^d");
  }
  for (int j = 0; j < m; ++j) {
    int rem = j;
    for (int i = 0; i < d; ++i) {
      const int cell = rem % k;
      rem /= k;
      const double frac = k == 1 ? 0.5 : static_cast<double>(cell) / (k - 1);
      pts(i, j) = box.lower(i) + (box.upper(i) - box.lower(i)) * frac;
    }
  }
  return pts;
}

void TestbedConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("TestbedConfig: dim must be >= 1");
  if (grid_size < 2) throw std::invalid_argument("TestbedConfig: grid_size must be >= 2");
  if (n_paths < 1) throw std::invalid_argument("TestbedConfig: n_paths must be >= 1");
  if (budget < 1 || budget > grid_size) {
    throw std::invalid_argument("TestbedConfig: need 1 <= budget <= grid_size");
  }
  kernel();  // validates sigma2/beta/nu
}

MaternKernel TestbedConfig::kernel() const {
  const double b = beta > 0.0 ? beta : beta_from_dimension(dim);
  return MaternKernel(sigma2, b, MaternSmoothness(nu));
}

GridTruth Testbed::truth_of(int path_id) const {
  const PathTruth& t = truths[static_cast<std::size_t>(path_id)];
  return {t.max_value, grid.col(t.argmax_index)};
}

Testbed generate_testbed(const TestbedConfig& config) {
  config.validate();
  Testbed bed;
  bed.config = config;
  const Box box(Eigen::VectorXd::Zero(config.dim), Eigen::VectorXd::Ones(config.dim));
  bed.grid = make_grid(box, config.grid_size, config.scheme, config.seed);
  const Design grid_design(bed.grid);
  bed.paths = sample_paths(config.kernel(), grid_design, config.n_paths, config.seed);
  bed.truths.reserve(static_cast<std::size_t>(config.n_paths));
  for (int p = 0; p < config.n_paths; ++p) {
    int arg = 0;
    for (int j = 1; j < config.grid_size; ++j) {
      if (bed.paths(p, j) > bed.paths(p, arg)) {
        arg = j;
      }
    }
    bed.truths.push_back({bed.paths(p, arg), arg});
  }
  return bed;
}

BenchmarkResult run_benchmark(const Testbed& testbed, std::span<const Policy> strategies,
                              int budget, int n_threads) {
  const int n_paths = testbed.config.n_paths;
  const int m = testbed.config.grid_size;
  if (strategies.empty()) {
    throw std::invalid_argument("run_benchmark: need at least one strategy");
  }
  if (budget < 1 || budget > m) {
    throw std::invalid_argument("run_benchmark: need 1 <= budget <= grid size");
  }
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
  }

  const MaternKernel kernel = testbed.config.kernel();
  const Box box(Eigen::VectorXd::Zero(testbed.config.dim),
                Eigen::VectorXd::Ones(testbed.config.dim));
  const CandidateSet cand(testbed.grid, box.volume());
  const int n_strat = static_cast<int>(strategies.size());
  const int n_runs = n_paths * n_strat;

  struct RunSlot {
    std::vector<StepErrors> errors;
    std::string failure;
  };
  std::vector<RunSlot> slots(static_cast<std::size_t>(n_runs));

  std::atomic<int> next_run{0};
  auto worker = [&]() {
    while (true) {
      const int run = next_run.fetch_add(1);
      if (run >= n_runs) {
        return;
      }
      const int path = run / n_strat;
      const int strat = run % n_strat;
      RunSlot& slot = slots[static_cast<std::size_t>(run)];
      try {
        const Objective objective = [&, path](int idx, const Eigen::VectorXd&) {
          return testbed.paths(path, idx);
        };
        const std::uint64_t run_seed = testbed.config.seed + static_cast<std::uint64_t>(path);
        const OptimizationTrace trace = run_optimization(
            objective, kernel, box, budget, cand, strategies[static_cast<std::size_t>(strat)],
            run_seed);
        slot.errors = extract_estimators(trace, testbed.truth_of(path));
      } catch (const std::exception& e) {
        slot.failure = e.what();
        if (slot.failure.empty()) {
          slot.failure = "unknown failure";
        }
      }
    }
  };

  std::vector<std::thread> pool;
  const int k = std::min(n_threads, n_runs);
  pool.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }

  BenchmarkResult result;
  std::vector<char> path_failed(static_cast<std::size_t>(n_paths), 0);
  for (int run = 0; run < n_runs; ++run) {
    const RunSlot& slot = slots[static_cast<std::size_t>(run)];
    if (!slot.failure.empty()) {
      const int path = run / n_strat;
      const int strat = run % n_strat;
      path_failed[static_cast<std::size_t>(path)] = 1;
      result.failures.push_back(
          {path, strategies[static_cast<std::size_t>(strat)].kind, slot.failure});
    }
  }
  if (result.failures.size() * 100 > static_cast<std::size_t>(n_runs)) {
    throw BenchmarkError("run_benchmark: more than 1% of runs failed");
  }
  // A failed run drops its whole path so the record set stays balanced
  // across strategies.
  for (int path = 0; path < n_paths; ++path) {
    if (path_failed[static_cast<std::size_t>(path)]) {
      continue;
    }
    for (int strat = 0; strat < n_strat; ++strat) {
      const RunSlot& slot = slots[static_cast<std::size_t>(path * n_strat + strat)];
      for (int n = 0; n < static_cast<int>(slot.errors.size()); ++n) {
        result.records.push_back({path, strategies[static_cast<std::size_t>(strat)].kind, n + 1,
                                  slot.errors[static_cast<std::size_t>(n)].value_error,
                                  slot.errors[static_cast<std::size_t>(n)].location_error});
      }
    }
  }
  return result;
}

std::vector<AggregateRow> aggregate(const std::vector<BenchmarkRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate: empty record set");
  }
  struct Cell {
    std::vector<double> value_errors;
    std::vector<double> location_errors;
  };
  std::map<std::pair<int, int>, Cell> cells;  // (strategy order, n)
  auto strategy_rank = [](PolicyKind k) { return k == PolicyKind::kEiMax ? 0 : 1; };
  for (const BenchmarkRecord& rec : records) {
    Cell& cell = cells[{strategy_rank(rec.strategy), rec.n}];
    cell.value_errors.push_back(rec.value_error);
    cell.location_errors.push_back(rec.location_error);
  }
  const std::size_t count = cells.begin()->second.value_errors.size();
  for (const auto& [key, cell] : cells) {
    if (cell.value_errors.size() != count) {
      throw BenchmarkError("aggregate: unbalanced record set");
    }
  }
  auto mean_se = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) {
      return std::pair<double, double>{mean, 0.0};
    }
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    return std::pair<double, double>{mean, std::sqrt(var / static_cast<double>(xs.size()))};
  };
  std::vector<AggregateRow> rows;
  rows.reserve(cells.size());
  for (const auto& [key, cell] : cells) {
    const auto [mv, sv] = mean_se(cell.value_errors);
    const auto [ml, sl] = mean_se(cell.location_errors);
    rows.push_back({key.first == 0 ? PolicyKind::kEiMax : PolicyKind::kEieiMin, key.second, mv, sv,
                    ml, sl});
  }
  return rows;
}

double demo_function_1d(double x) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw std::domain_error("demo_function_1d: x must lie in [-1, 1]");
  }
  const double quad = (0.8 * x - 0.2) * (0.8 * x - 0.2);
  const double wide = std::exp(-0.5 * std::pow(std::fabs(x + 0.1), 1.95) / std::pow(0.1, 1.95));
  const double narrow = std::exp(-0.5 * (2.0 * x - 0.6) * (2.0 * x - 0.6) / 0.1);
  return quad + wide + narrow - 0.02;
}

namespace csv {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_records(std::ostream& os, const std::vector<BenchmarkRecord>& records) {
  os << "path_id,strategy,n,value_error,location_error\n";
  for (const BenchmarkRecord& rec : records) {
    os << rec.path_id << ',' << policy_name(rec.strategy) << ',' << rec.n << ','
       << format17(rec.value_error) << ',' << format17(rec.location_error) << '\n';
  }
}

std::vector<BenchmarkRecord> read_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "path_id,strategy,n,value_error,location_error") {
    throw std::invalid_argument("read_records: bad header");
  }
  std::vector<BenchmarkRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    BenchmarkRecord rec;
    auto next = [&]() {
      if (!std::getline(ss, field, ',')) {
        throw std::invalid_argument("read_records: short row: " + line);
      }
      return field;
    };
    rec.path_id = std::stoi(next());
    const std::string strat = next();
    if (strat == "ei") {
      rec.strategy = PolicyKind::kEiMax;
    } else if (strat == "eiei") {
      rec.strategy = PolicyKind::kEieiMin;
    } else {
      throw std::invalid_argument("read_records: unknown strategy: " + strat);
    }
    rec.n = std::stoi(next());
    rec.value_error = std::strtod(next().c_str(), nullptr);
    rec.location_error = std::strtod(next().c_str(), nullptr);
    records.push_back(rec);
  }
  return records;
}

void write_aggregate(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << "strategy,n,mean_value_error,se_value_error,mean_location_error,se_location_error\n";
  for (const AggregateRow& row : rows) {
    os << policy_name(row.strategy) << ',' << row.n << ',' << format17(row.mean_value_error) << ','
       << format17(row.se_value_error) << ',' << format17(row.mean_location_error) << ','
       << format17(row.se_location_error) << '\n';
  }
}

}  // namespace csv

}  // namespace eiei
