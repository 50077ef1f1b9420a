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

#include "eiei/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eiei/acquisition.hpp"
#include "eiei/errors.hpp"
#include "eiei/strategy.hpp"

namespace fs = std::filesystem;
using eiei::CliOverrides;
using eiei::cmd_bench_aggregate;
using eiei::cmd_bench_run;
using eiei::cmd_demo_criteria;
using eiei::cmd_optimize;
using eiei::ConfigError;
using eiei::KeyValueConfig;

namespace {

// Scratch directory, wiped per test case.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) : path_(fs::temp_directory_path() / ("eiei_" + tag)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream os(p);
    os << text;
    return p;
  }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    lines.push_back(line);
  }
  return lines;
}

const std::string kOptimizeConfig =
    "# demo run\n"
    "dimension = 1\n"
    "lower = -1\n"
    "upper = 1\n"
    "sigma2 = 1.0\n"
    "beta = 0.25\n"
    "nu = 6.5\n"
    "policy = eiei\n"
    "budget = 8\n"
    "candidates = 101\n"
    "grid = regular\n"
    "objective = demo1d\n"
    "seed = 11\n";

}  // namespace

TEST_CASE("key-value parsing") {
  KeyValueConfig cfg = KeyValueConfig::parse_string(
      "alpha = 3.5   # trailing comment\n"
      "\n"
      "# full comment\n"
      "name = hello world\n"
      "count = 7\n");
  CHECK(cfg.get_double("alpha") == 3.5);
  CHECK(cfg.get_string("name") == "hello world");
  CHECK(cfg.get_int("count") == 7);
  CHECK_THROWS_AS(cfg.get_string("missing"), ConfigError);
  cfg.reject_unused();

  KeyValueConfig unused = KeyValueConfig::parse_string("a = 1\nb = 2\n");
  unused.get_int("a");
  CHECK_THROWS_AS(unused.reject_unused(), ConfigError);

  CHECK_THROWS_AS(KeyValueConfig::parse_string("novalue\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("a = 1\na = 2\n"), ConfigError);
  KeyValueConfig types = KeyValueConfig::parse_string("x = 1.5\nn = -3\nu = 12\nv = 1 2 3\n");
  CHECK_THROWS_AS(types.get_int("x"), ConfigError);
  CHECK_THROWS_AS(types.get_uint64("n"), ConfigError);
  CHECK(types.get_uint64("u") == 12);
  CHECK(types.get_doubles("v") == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("cmd_optimize writes a deterministic trace") {
  const TempDir tmp("optimize");
  const fs::path cfg = tmp.write("run.cfg", kOptimizeConfig);
  std::ostringstream log;
  const fs::path out = cmd_optimize(cfg, tmp.path(), {}, log);
  const std::string first = slurp(out);
  const auto rows = lines_of(first);
  REQUIRE(rows.size() == 9);  // header + 8 steps
  CHECK(rows[0] == "n,x1,f,running_max,criterion_value");
  // step 1 sits at the snapped center with no criterion
  CHECK(rows[1].substr(0, 4) == "1,0,");
  CHECK(rows[1].find("nan") != std::string::npos);
  // deterministic across reruns
  cmd_optimize(cfg, tmp.path(), {}, log);
  CHECK(slurp(out) == first);
  // budget 1: single row at the center
  const fs::path cfg1 = tmp.write("one.cfg", [] {
    std::string s = kOptimizeConfig;
    return s.replace(s.find("budget = 8"), 10, "budget = 1");
  }());
  const TempDir tmp1("optimize_one");
  const fs::path out1 = cmd_optimize(cfg1, tmp1.path(), {}, log);
  CHECK(lines_of(slurp(out1)).size() == 2);
}

TEST_CASE("cmd_optimize final best matches a library-level replay") {
  const TempDir tmp("optimize_replay");
  const fs::path cfg = tmp.write("run.cfg", kOptimizeConfig);
  std::ostringstream log;
  const fs::path out = cmd_optimize(cfg, tmp.path(), {}, log);
  const auto rows = lines_of(slurp(out));

  const eiei::Box box((Eigen::VectorXd(1) << -1.0).finished(),
                      (Eigen::VectorXd(1) << 1.0).finished());
  const eiei::CandidateSet cand(Eigen::VectorXd::LinSpaced(101, -1.0, 1.0).transpose(), 2.0);
  const eiei::MaternKernel kernel(1.0, 0.25, eiei::MaternSmoothness(6.5));
  const eiei::OptimizationTrace replay = eiei::run_optimization(
      [](int, const Eigen::VectorXd& x) { return eiei::demo_function_1d(x(0)); }, kernel, box, 8,
      cand, eiei::Policy{eiei::PolicyKind::kEieiMin}, 11);
  const std::string last = rows.back();
  const std::string expect = eiei::csv::format17(replay.running_max(7));
  CHECK(last.find("," + expect + ",") != std::string::npos);
}

TEST_CASE("cmd_optimize validation failures") {
  const TempDir tmp("optimize_bad");
  std::ostringstream log;
  // unknown key
  const fs::path bad1 = tmp.write("bad1.cfg", kOptimizeConfig + "typo_key = 3\n");
  CHECK_THROWS_AS(cmd_optimize(bad1, tmp.path(), {}, log), ConfigError);
  // missing seed
  std::string noseed = kOptimizeConfig;
  noseed.erase(noseed.find("seed = 11"), 9);
  const fs::path bad2 = tmp.write("bad2.cfg", noseed);
  CHECK_THROWS_AS(cmd_optimize(bad2, tmp.path(), {}, log), ConfigError);
  // seed override rescues it
  CliOverrides with_seed;
  with_seed.seed = 11;
  const fs::path out = cmd_optimize(bad2, tmp.path(), with_seed, log);
  CHECK(fs::exists(out));
  // demo objective outside [-1,1]
  std::string wide = kOptimizeConfig;
  wide.replace(wide.find("upper = 1"), 9, "upper = 2");
  CHECK_THROWS_AS(cmd_optimize(tmp.write("bad3.cfg", wide), tmp.path(), {}, log), ConfigError);
  // objective table mismatch: wrong column count
  std::string table = kOptimizeConfig;
  table.replace(table.find("objective = demo1d"), 18, "objective = table ");
  table.erase(table.find("candidates = 101\n"), 17);
  table.erase(table.find("grid = regular\n"), 15);
  table += "objective_file = " + (tmp.path() / "tab.csv").string() + "\n";
  tmp.write("tab.csv", "0.0,1.0,9.9\n");
  CHECK_THROWS_AS(cmd_optimize(tmp.write("bad4.cfg", table), tmp.path(), {}, log), ConfigError);
}

TEST_CASE("cmd_optimize on a tabulated objective") {
  const TempDir tmp("optimize_table");
  std::ostringstream log;
  std::string table_cfg =
      "dimension = 1\nlower = 0\nupper = 1\nsigma2 = 1.0\nbeta = 0.2\nnu = 6.5\n"
      "policy = ei\nbudget = 4\nobjective = table\nseed = 5\n";
  std::string rows;
  for (int i = 0; i < 12; ++i) {
    const double x = i / 11.0;
    rows += eiei::csv::format17(x) + "," + eiei::csv::format17(x * (1.0 - x)) + "\n";
  }
  tmp.write("values.csv", rows);
  table_cfg += "objective_file = " + (tmp.path() / "values.csv").string() + "\n";
  const fs::path out = cmd_optimize(tmp.write("t.cfg", table_cfg), tmp.path(), {}, log);
  const auto out_rows = lines_of(slurp(out));
  REQUIRE(out_rows.size() == 5);
  // the run reaches the tabulated maximum (recomputed exactly as generated)
  double table_max = -1.0;
  for (int i = 0; i < 12; ++i) {
    const double x = i / 11.0;
    table_max = std::max(table_max, x * (1.0 - x));
  }
  CHECK(slurp(out).find("," + eiei::csv::format17(table_max) + ",") != std::string::npos);
}

TEST_CASE("cmd_demo_criteria output invariants") {
  const TempDir tmp("demo");
  std::ostringstream log;
  const fs::path cfg = tmp.write("demo.cfg",
                                 "dimension = 1\n"
                                 "sigma2 = 1.0\n"
                                 "beta = 0.25\n"
                                 "nu = 6.5\n"
                                 "design = -0.75 -0.35 0.05 0.45 0.85\n"
                                 "grid = 81\n");
  const fs::path out = cmd_demo_criteria(cfg, tmp.path(), {}, log);
  const auto rows = lines_of(slurp(out));
  REQUIRE(rows.size() == 83);  // comment + header + 81 points
  CHECK(rows[0].substr(0, 18) == "# integrated_ei = ");
  const double hprime = std::strtod(rows[0].c_str() + 18, nullptr);
  CHECK(rows[1] == "x,posterior_mean,posterior_sd,EI,EEI_diag,aleph");

  // parse and re-check the advertised invariants
  int argmin_aleph = -1;
  double min_aleph = 1e300;
  std::vector<double> xs;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::string field;
    std::vector<double> cols;
    while (std::getline(ss, field, ',')) {
      cols.push_back(std::strtod(field.c_str(), nullptr));
    }
    REQUIRE(cols.size() == 6);
    xs.push_back(cols[0]);
    CHECK(cols[3] >= 0.0);                   // EI
    CHECK(std::fabs(cols[4]) <= 1e-10);      // EEI_diag vanishes identically
    CHECK(cols[5] >= 0.0);                   // aleph
    CHECK(cols[5] <= hprime + 1e-9);         // aleph bounded by integrated EI
    if (cols[5] < min_aleph) {
      min_aleph = cols[5];
      argmin_aleph = static_cast<int>(i - 2);
    }
  }
  // EI vanishes at observed non-best design points (values <= best)
  for (std::size_t i = 2; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::string field;
    std::getline(ss, field, ',');
    const double x = std::strtod(field.c_str(), nullptr);
    if (std::fabs(x - (-0.75)) < 1e-12) {
      std::getline(ss, field, ',');
      std::getline(ss, field, ',');
      std::getline(ss, field, ',');
      CHECK(std::strtod(field.c_str(), nullptr) == 0.0);
    }
  }

  // the emitted argmin matches select_next_eiei on the same grid
  Eigen::MatrixXd design(1, 5);
  design << -0.75, -0.35, 0.05, 0.45, 0.85;
  Eigen::VectorXd vals(5);
  for (int i = 0; i < 5; ++i) {
    vals(i) = eiei::demo_function_1d(design(0, i));
  }
  const eiei::GpPosterior post(eiei::MaternKernel(1.0, 0.25, eiei::MaternSmoothness(6.5)),
                               eiei::Design(design), vals);
  Eigen::MatrixXd grid(1, 81);
  for (int j = 0; j < 81; ++j) {
    grid(0, j) = -1.0 + 2.0 * j / 80.0;
  }
  const eiei::CandidateSet cand(grid, 2.0);
  const eiei::Selection sel =
      eiei::select_next_eiei(post, eiei::Threshold{vals.maxCoeff()}, cand);
  CHECK(sel.index == argmin_aleph);

  // non-1-D config errors out
  const fs::path bad = tmp.write("bad.cfg",
                                 "dimension = 2\nsigma2 = 1\nbeta = 0.25\nnu = 6.5\n"
                                 "design = 0.0\ngrid = 11\n");
  CHECK_THROWS_AS(cmd_demo_criteria(bad, tmp.path(), {}, log), ConfigError);
}

TEST_CASE("cmd_bench_run writes records and aggregate; aggregate recomputes") {
  const TempDir tmp("bench");
  std::ostringstream log;
  const fs::path cfg = tmp.write("bench.cfg",
                                 "dimension = 2\n"
                                 "m = 25\n"
                                 "n_paths = 2\n"
                                 "budget = 3\n"
                                 "sigma2 = 1.0\n"
                                 "beta = auto\n"
                                 "nu = 6.5\n"
                                 "grid = uniform\n"
                                 "strategies = ei eiei\n"
                                 "seed = 21\n");
  CliOverrides overrides;
  overrides.threads = 2;
  const eiei::BenchOutputs outputs = cmd_bench_run(cfg, tmp.path(), overrides, log);
  const auto record_rows = lines_of(slurp(outputs.records_csv));
  CHECK(record_rows.size() == 1 + 2 * 2 * 3);  // header + paths x strategies x budget
  CHECK(record_rows[0] == "path_id,strategy,n,value_error,location_error");
  const std::string agg_first = slurp(outputs.aggregate_csv);
  CHECK(lines_of(agg_first)[0] ==
        "strategy,n,mean_value_error,se_value_error,mean_location_error,se_location_error");
  CHECK(lines_of(agg_first).size() == 1 + 2 * 3);

  // bench aggregate on the records reproduces the aggregate exactly
  const TempDir tmp2("bench_agg");
  const fs::path agg_cfg =
      tmp2.write("agg.cfg", "records = " + outputs.records_csv.string() + "\n");
  const fs::path re_agg = cmd_bench_aggregate(agg_cfg, tmp2.path(), {}, log);
  CHECK(slurp(re_agg) == agg_first);

  // n_paths = 1, budget = 2: exactly 4 record rows
  const fs::path cfg_small = tmp.write("small.cfg",
                                       "dimension = 1\nm = 12\nn_paths = 1\nbudget = 2\n"
                                       "sigma2 = 1.0\nbeta = 0.2\nnu = 6.5\n"
                                       "strategies = ei eiei\nseed = 4\n");
  const TempDir tmp3("bench_small");
  const eiei::BenchOutputs small = cmd_bench_run(cfg_small, tmp3.path(), overrides, log);
  CHECK(lines_of(slurp(small.records_csv)).size() == 5);
}

TEST_CASE("eiei binary: exit codes and byte-identical reruns") {
  const char* exe = std::getenv("EIEI_CLI");
  REQUIRE(exe != nullptr);
  const TempDir tmp("binary");
  const fs::path cfg = tmp.write("run.cfg", kOptimizeConfig);
  const std::string quiet = " > /dev/null 2>&1";

  auto run = [&](const std::string& args) {
    const int status = std::system((std::string(exe) + " " + args + quiet).c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run("optimize --config " + cfg.string() + " --out " + (tmp.path() / "a").string()) == 0);
  CHECK(run("optimize --config " + cfg.string() + " --out " + (tmp.path() / "b").string()) == 0);
  CHECK(slurp(tmp.path() / "a" / "trace.csv") == slurp(tmp.path() / "b" / "trace.csv"));
  // usage error: missing --config
  CHECK(run("optimize") == 1);
  // config error: nonexistent file
  CHECK(run("optimize --config " + (tmp.path() / "nope.cfg").string()) == 1);
  // config error: bad budget
  std::string bad = kOptimizeConfig;
  bad.replace(bad.find("budget = 8"), 10, "budget = 0");
  CHECK(run("optimize --config " + tmp.write("bad.cfg", bad).string()) == 1);
  // numerical failure: the only remaining candidate duplicates an observed
  // point, so the noiseless model rejects the re-evaluation
  std::string dup =
      "dimension = 1\nlower = 0\nupper = 1\nsigma2 = 1.0\nbeta = 0.2\nnu = 6.5\n"
      "policy = ei\nbudget = 2\nobjective = table\nseed = 5\n";
  tmp.write("dup.csv", "0.25,1.0\n0.25,2.0\n");
  dup += "objective_file = " + (tmp.path() / "dup.csv").string() + "\n";
  CHECK(run("optimize --config " + tmp.write("dup.cfg", dup).string()) == 2);
}
