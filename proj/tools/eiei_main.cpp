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

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "eiei/cli.hpp"
#include "eiei/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct CommonArgs {
  std::string config;
  std::string out = ".";
  int threads = 0;
  std::int64_t seed = -1;

  eiei::CliOverrides overrides() const {
    eiei::CliOverrides o;
    o.threads = threads;
    if (seed >= 0) {
      o.seed = static_cast<std::uint64_t>(seed);
    }
    return o;
  }
};

void add_common(CLI::App* app, CommonArgs& args) {
  app->add_option("--config", args.config, "Configuration file")->required();
  app->add_option("--out", args.out, "Output directory");
  app->add_option("--threads", args.threads, "Worker threads (0 = machine parallelism)");
  app->add_option("--seed", args.seed, "Seed override (wins over the config)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process global optimization with the integrated expected-improvement "
               "sampling criterion"};
  app.require_subcommand(1);

  CommonArgs optimize_args;
  CLI::App* optimize = app.add_subcommand("optimize", "Run one sequential optimization");
  add_common(optimize, optimize_args);

  CommonArgs demo_args;
  CLI::App* demo =
      app.add_subcommand("demo-criteria", "Emit 1-D criterion curves for a fixed design");
  add_common(demo, demo_args);

  CLI::App* bench = app.add_subcommand("bench", "Benchmark the sampling strategies");
  bench->require_subcommand(1);
  CommonArgs bench_run_args;
  CLI::App* bench_run = bench->add_subcommand("run", "Generate a testbed and race the strategies");
  add_common(bench_run, bench_run_args);
  CommonArgs bench_agg_args;
  CLI::App* bench_agg =
      bench->add_subcommand("aggregate", "Recompute mean curves from a records CSV");
  add_common(bench_agg, bench_agg_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (optimize->parsed()) {
      eiei::cmd_optimize(optimize_args.config, optimize_args.out, optimize_args.overrides(),
                         std::cout);
    } else if (demo->parsed()) {
      eiei::cmd_demo_criteria(demo_args.config, demo_args.out, demo_args.overrides(), std::cout);
    } else if (bench_run->parsed()) {
      eiei::cmd_bench_run(bench_run_args.config, bench_run_args.out, bench_run_args.overrides(),
                          std::cout);
    } else if (bench_agg->parsed()) {
      eiei::cmd_bench_aggregate(bench_agg_args.config, bench_agg_args.out,
                                bench_agg_args.overrides(), std::cout);
    }
  } catch (const eiei::ConfigError& e) {
    // commands validate everything up front; this class is usage/config
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
