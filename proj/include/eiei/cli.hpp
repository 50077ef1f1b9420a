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
// Configuration files and the command bodies behind the CLI entry point.
// Configs are flat `key = value` files ('#' starts a comment); every
// command validates its whole configuration before any computation starts.

#ifndef EIEI_CLI_HPP
#define EIEI_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "eiei/benchlab.hpp"

namespace eiei {

class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::filesystem::path& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key);
  std::string get_string_or(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  int get_int(const std::string& key);
  std::uint64_t get_uint64(const std::string& key);
  std::vector<double> get_doubles(const std::string& key);  // space-separated

  // Rejects keys that were present but never read (typo protection).
  void reject_unused() const;

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> used_;
};

// Overrides shared by all commands.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  int threads = 0;  // <= 0: machine parallelism
};

// optimize: run one sequential optimization, write <out>/trace.csv with
// per-step rows n,x...,f,running_max,criterion_value.
std::filesystem::path cmd_optimize(const std::filesystem::path& config_path,
                                   const std::filesystem::path& out_dir,
                                   const CliOverrides& overrides, std::ostream& log);

// demo-criteria: condition on a fixed 1-D design and write
// <out>/criteria.csv with x,posterior_mean,posterior_sd,EI,EEI_diag,aleph
// per grid point (the current integrated EI goes into the header comment).
std::filesystem::path cmd_demo_criteria(const std::filesystem::path& config_path,
                                        const std::filesystem::path& out_dir,
                                        const CliOverrides& overrides, std::ostream& log);

struct BenchOutputs {
  std::filesystem::path records_csv;
  std::filesystem::path aggregate_csv;
};

// bench run: generate the testbed, race the strategies, write records and
// aggregate CSVs, print a summary table.
BenchOutputs cmd_bench_run(const std::filesystem::path& config_path,
                           const std::filesystem::path& out_dir, const CliOverrides& overrides,
                           std::ostream& log);

// bench aggregate: recompute the aggregate CSV from an existing records
// CSV (config key `records`, default <out>/records.csv).
std::filesystem::path cmd_bench_aggregate(const std::filesystem::path& config_path,
                                          const std::filesystem::path& out_dir,
                                          const CliOverrides& overrides, std::ostream& log);

}  // namespace eiei

#endif  // EIEI_CLI_HPP
