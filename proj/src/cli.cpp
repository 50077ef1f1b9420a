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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eiei/acquisition.hpp"
#include "eiei/errors.hpp"

namespace eiei {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) {
      throw std::invalid_argument(raw);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a number: '" + raw + "'");
  }
}

GridScheme parse_scheme(const std::string& raw) {
  if (raw == "uniform") return GridScheme::kUniformRandom;
  if (raw == "regular") return GridScheme::kRegular;
  throw ConfigError("config: grid scheme must be 'uniform' or 'regular', got '" + raw + "'");
}

PolicyKind parse_policy(const std::string& raw) {
  if (raw == "ei") return PolicyKind::kEiMax;
  if (raw == "eiei") return PolicyKind::kEieiMin;
  throw ConfigError("config: policy must be 'ei' or 'eiei', got '" + raw + "'");
}

// Kernel block shared by the commands; `beta = auto` resolves by dimension.
MaternKernel parse_kernel(KeyValueConfig& cfg, int dim) {
  const double sigma2 = cfg.get_double("sigma2");
  const double nu = cfg.get_double("nu");
  const std::string beta_raw = cfg.get_string("beta");
  double beta = 0.0;
  beta = beta_raw == "auto" ? beta_from_dimension(dim) : parse_double("beta", beta_raw);
  try {
    return MaternKernel(sigma2, beta, MaternSmoothness(nu));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: invalid kernel: ") + e.what());
  }
}

Box parse_box(KeyValueConfig& cfg, int dim) {
  auto expand = [&](const char* key) {
    std::vector<double> v = cfg.get_doubles(key);
    if (v.size() == 1) {
      v.assign(static_cast<std::size_t>(dim), v[0]);
    }
    if (static_cast<int>(v.size()) != dim) {
      throw ConfigError(std::string("config: '") + key + "' needs 1 or dimension entries");
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), dim).eval();
  };
  const Eigen::VectorXd lo = expand("lower");
  const Eigen::VectorXd hi = expand("upper");
  try {
    return Box(lo, hi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: invalid domain: ") + e.what());
  }
}

std::uint64_t required_seed(KeyValueConfig& cfg, const CliOverrides& overrides) {
  if (overrides.seed.has_value()) {
    if (cfg.has("seed")) {
      cfg.get_uint64("seed");  // mark used; the flag wins
    }
    return *overrides.seed;
  }
  if (!cfg.has("seed")) {
    throw ConfigError("config: 'seed' is required (no wall-clock default)");
  }
  return cfg.get_uint64("seed");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream os(path, std::ios::binary);  // '\n' only, byte-stable output
  if (!os) {
    throw ConfigError("cannot open output file: " + path.string());
  }
  return os;
}

// Tabulated objective: rows of x1,...,xd,f defining both the candidate
// grid and the values on it.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> read_table(const std::filesystem::path& path,
                                                       int dim) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError("objective table: cannot open " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      row.push_back(parse_double("objective_file row", trim(field)));
    }
    if (static_cast<int>(row.size()) != dim + 1) {
      throw ConfigError("objective table: row with " + std::to_string(row.size()) +
                        " fields, expected dimension+1 = " + std::to_string(dim + 1));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ConfigError("objective table: no rows in " + path.string());
  }
  Eigen::MatrixXd pts(dim, static_cast<int>(rows.size()));
  Eigen::VectorXd vals(static_cast<int>(rows.size()));
  for (int j = 0; j < static_cast<int>(rows.size()); ++j) {
    for (int i = 0; i < dim; ++i) {
      pts(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    vals(j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(dim)];
  }
  return {pts, vals};
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    if (cfg.entries_.count(key) != 0) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                        "'");
    }
    cfg.entries_[key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValueConfig::get_string(const std::string& key) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError("config: missing required key '" + key + "'");
  }
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get_string_or(const std::string& key, const std::string& fallback) {
  if (!has(key)) {
    return fallback;
  }
  return get_string(key);
}

double KeyValueConfig::get_double(const std::string& key) {
  return parse_double(key, get_string(key));
}

int KeyValueConfig::get_int(const std::string& key) {
  const double v = get_double(key);
  if (v != std::floor(v) || std::fabs(v) > 2e9) {
    throw ConfigError("config: key '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key) {
  const std::string raw = get_string(key);
  try {
    if (raw.find('-') != std::string::npos) {  // stoull would wrap silently
      throw std::invalid_argument(raw);
    }
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(raw, &pos);
    if (pos != raw.size()) {
      throw std::invalid_argument(raw);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' is not a nonnegative integer: '" + raw + "'");
  }
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) {
  std::stringstream ss(get_string(key));
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) {
    out.push_back(parse_double(key, tok));
  }
  if (out.empty()) {
    throw ConfigError("config: key '" + key + "' has no values");
  }
  return out;
}

void KeyValueConfig::reject_unused() const {
  for (const auto& [key, value] : entries_) {
    if (used_.count(key) == 0) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
}

std::filesystem::path cmd_optimize(const std::filesystem::path& config_path,
                                   const std::filesystem::path& out_dir,
                                   const CliOverrides& overrides, std::ostream& log) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
  const int dim = cfg.get_int("dimension");
  if (dim < 1) {
    throw ConfigError("config: dimension must be >= 1");
  }
  const Box box = parse_box(cfg, dim);
  const MaternKernel kernel = parse_kernel(cfg, dim);
  const Policy policy{parse_policy(cfg.get_string("policy"))};
  const int budget = cfg.get_int("budget");
  if (budget < 1) {
    throw ConfigError("config: budget must be >= 1");
  }
  const std::uint64_t seed = required_seed(cfg, overrides);
  const std::string objective_kind = cfg.get_string("objective");

  Eigen::MatrixXd cand_points;
  Objective objective;
  Eigen::VectorXd table_values;
  if (objective_kind == "demo1d") {
    if (dim != 1) {
      throw ConfigError("config: objective demo1d requires dimension = 1");
    }
    if (box.lower(0) < -1.0 || box.upper(0) > 1.0) {
      throw ConfigError("config: demo1d domain must lie within [-1, 1]");
    }
    const int m = cfg.get_int("candidates");
    if (m < budget) {
      throw ConfigError("config: candidates must be >= budget");
    }
    const GridScheme scheme = parse_scheme(cfg.get_string("grid"));
    cand_points = make_grid(box, m, scheme, seed);
    objective = [](int, const Eigen::VectorXd& x) { return demo_function_1d(x(0)); };
  } else if (objective_kind == "table") {
    if (cfg.has("candidates") || cfg.has("grid")) {
      throw ConfigError("config: 'candidates'/'grid' conflict with objective = table");
    }
    auto [pts, vals] = read_table(cfg.get_string("objective_file"), dim);
    if (static_cast<int>(pts.cols()) < budget) {
      throw ConfigError("config: objective table smaller than budget");
    }
    cand_points = std::move(pts);
    table_values = std::move(vals);
    objective = [table_values](int idx, const Eigen::VectorXd&) { return table_values(idx); };
  } else {
    throw ConfigError("config: objective must be 'demo1d' or 'table', got '" + objective_kind +
                      "'");
  }
  cfg.reject_unused();

  const CandidateSet cand(cand_points, box.volume());
  const OptimizationTrace trace =
      run_optimization(objective, kernel, box, budget, cand, policy, seed);

  const std::filesystem::path out_path = out_dir / "trace.csv";
  std::ofstream os = open_output(out_path);
  os << "n";
  for (int i = 0; i < dim; ++i) {
    os << ",x" << (i + 1);
  }
  os << ",f,running_max,criterion_value\n";
  for (int n = 0; n < trace.size(); ++n) {
    os << (n + 1);
    for (int i = 0; i < dim; ++i) {
      os << ',' << csv::format17(trace.points(i, n));
    }
    os << ',' << csv::format17(trace.values(n)) << ',' << csv::format17(trace.running_max(n))
       << ',' << csv::format17(trace.diagnostics[static_cast<std::size_t>(n)].criterion_value)
       << '\n';
  }
  log << "optimize: " << policy_name(policy.kind) << " policy, " << trace.size()
      << " evaluations, best value " << csv::format17(trace.running_max(trace.size() - 1))
      << "\n";
  return out_path;
}

std::filesystem::path cmd_demo_criteria(const std::filesystem::path& config_path,
                                        const std::filesystem::path& out_dir,
                                        [[maybe_unused]] const CliOverrides& overrides,
                                        std::ostream& log) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
  const int dim = cfg.get_int("dimension");
  if (dim != 1) {
    throw ConfigError("config: demo-criteria requires dimension = 1");
  }
  const MaternKernel kernel = parse_kernel(cfg, 1);
  const std::vector<double> design_xs = cfg.get_doubles("design");
  const int grid_size = cfg.get_int("grid");
  if (grid_size < 2) {
    throw ConfigError("config: grid must be >= 2");
  }
  if (cfg.has("seed")) {
    cfg.get_uint64("seed");  // demo grid is regular; seed accepted but unused
  }
  cfg.reject_unused();

  const Box box((Eigen::VectorXd(1) << -1.0).finished(), (Eigen::VectorXd(1) << 1.0).finished());
  Eigen::MatrixXd design_pts(1, static_cast<int>(design_xs.size()));
  Eigen::VectorXd design_vals(static_cast<int>(design_xs.size()));
  for (int i = 0; i < static_cast<int>(design_xs.size()); ++i) {
    design_pts(0, i) = design_xs[static_cast<std::size_t>(i)];
    design_vals(i) = demo_function_1d(design_xs[static_cast<std::size_t>(i)]);
  }
  const GpPosterior post(kernel, Design(design_pts), design_vals);
  const Threshold t{design_vals.maxCoeff()};

  Eigen::MatrixXd grid(1, grid_size);
  for (int j = 0; j < grid_size; ++j) {
    grid(0, j) = -1.0 + 2.0 * j / (grid_size - 1);
  }
  const CandidateSet cand(grid, box.volume());
  const double hprime = integrated_ei(post, t, cand);
  const std::vector<double> ei_vals = ei_profile(post, t, cand);
  const std::vector<double> aleph = eiei_profile(post, t, cand);
  const auto [means, cov] = post.mean_cov(grid);

  const std::filesystem::path out_path = out_dir / "criteria.csv";
  std::ofstream os = open_output(out_path);
  os << "# integrated_ei = " << csv::format17(hprime) << "\n";
  os << "x,posterior_mean,posterior_sd,EI,EEI_diag,aleph\n";
  for (int j = 0; j < grid_size; ++j) {
    const double sd = std::sqrt(std::max(0.0, cov(j, j)));
    const double eei_diag = eei(post, t, grid.col(j), grid.col(j));
    os << csv::format17(grid(0, j)) << ',' << csv::format17(means(j)) << ','
       << csv::format17(sd) << ',' << csv::format17(ei_vals[static_cast<std::size_t>(j)]) << ','
       << csv::format17(eei_diag) << ',' << csv::format17(aleph[static_cast<std::size_t>(j)])
       << '\n';
  }
  log << "demo-criteria: " << design_xs.size() << " design points, integrated EI "
      << csv::format17(hprime) << "\n";
  return out_path;
}

BenchOutputs cmd_bench_run(const std::filesystem::path& config_path,
                           const std::filesystem::path& out_dir, const CliOverrides& overrides,
                           std::ostream& log) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
  TestbedConfig bed_cfg;
  bed_cfg.dim = cfg.get_int("dimension");
  bed_cfg.grid_size = cfg.get_int("m");
  bed_cfg.n_paths = cfg.get_int("n_paths");
  bed_cfg.budget = cfg.get_int("budget");
  bed_cfg.sigma2 = cfg.get_double("sigma2");
  const std::string beta_raw = cfg.get_string("beta");
  bed_cfg.beta = beta_raw == "auto" ? 0.0 : parse_double("beta", beta_raw);
  bed_cfg.nu = cfg.get_double("nu");
  bed_cfg.scheme = parse_scheme(cfg.get_string_or("grid", "uniform"));
  bed_cfg.seed = required_seed(cfg, overrides);

  std::vector<Policy> strategies;
  {
    std::stringstream ss(cfg.get_string("strategies"));
    std::string tok;
    while (ss >> tok) {
      strategies.push_back(Policy{parse_policy(tok)});
    }
    if (strategies.empty()) {
      throw ConfigError("config: 'strategies' has no entries");
    }
    for (std::size_t i = 0; i < strategies.size(); ++i) {
      for (std::size_t j = i + 1; j < strategies.size(); ++j) {
        if (strategies[i].kind == strategies[j].kind) {
          throw ConfigError("config: duplicate strategy");
        }
      }
    }
  }
  try {
    bed_cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.reject_unused();

  const Testbed testbed = generate_testbed(bed_cfg);
  const BenchmarkResult result =
      run_benchmark(testbed, strategies, bed_cfg.budget, overrides.threads);
  const std::vector<AggregateRow> rows = aggregate(result.records);

  BenchOutputs outputs{out_dir / "records.csv", out_dir / "aggregate.csv"};
  {
    std::ofstream os = open_output(outputs.records_csv);
    csv::write_records(os, result.records);
  }
  {
    std::ofstream os = open_output(outputs.aggregate_csv);
    csv::write_aggregate(os, rows);
  }

  for (const RunFailure& failure : result.failures) {
    log << "bench: path " << failure.path_id << " (" << policy_name(failure.strategy)
        << ") failed: " << failure.message << "\n";
  }
  log << "bench: " << bed_cfg.n_paths << " paths, budget " << bed_cfg.budget << ", "
      << result.records.size() << " records\n";
  log << "strategy      n   mean_value_error   mean_location_error\n";
  for (const AggregateRow& row : rows) {
    if (row.n != bed_cfg.budget && row.n % 10 != 0 && row.n != 1) {
      continue;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-8s %4d   %16.6g   %19.6g\n",
                  policy_name(row.strategy).c_str(), row.n, row.mean_value_error,
                  row.mean_location_error);
    log << buf;
  }
  return outputs;
}

std::filesystem::path cmd_bench_aggregate(const std::filesystem::path& config_path,
                                          const std::filesystem::path& out_dir,
                                          [[maybe_unused]] const CliOverrides& overrides,
                                          std::ostream& log) {
  KeyValueConfig cfg = KeyValueConfig::parse_file(config_path);
  const std::string records_path =
      cfg.get_string_or("records", (out_dir / "records.csv").string());
  if (cfg.has("seed")) {
    cfg.get_uint64("seed");
  }
  cfg.reject_unused();

  std::ifstream is(records_path);
  if (!is) {
    throw ConfigError("bench aggregate: cannot open records file " + records_path);
  }
  const std::vector<BenchmarkRecord> records = csv::read_records(is);
  const std::vector<AggregateRow> rows = aggregate(records);
  const std::filesystem::path out_path = out_dir / "aggregate.csv";
  std::ofstream os = open_output(out_path);
  csv::write_aggregate(os, rows);
  log << "bench aggregate: " << records.size() << " records -> " << rows.size() << " rows\n";
  return out_path;
}

}  // namespace eiei
