// Copyright 2026 The qbo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

qbo::DesignSpace space_from_list(const std::string& list) {
  std::vector<std::uint64_t> ks;
  for (const auto& tok : qbo::csv::split(list, ',')) {
    std::uint64_t k = 0;
    if (!qbo::csv::parse_int(qbo::csv::trim(tok), k)) throw qbo::ConfigParseError(0, "sites", "bad cardinality '" + tok + "'");
    ks.push_back(k);
  }
  return qbo::DesignSpace::from_cardinalities(ks);
}

int cmd_run(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<double> threshold, bool resume) {
  qbo::ParsedConfig parsed;
  try {
    parsed = qbo::parse_run_config_file(config);
    if (seed) parsed.run.master_seed = *seed;
    if (threshold) parsed.run.threshold = *threshold;
    parsed.run.validate();
  } catch (const qbo::Error& e) {
    std::cerr << "qbo run: " << e.what() << '\n';
    return kExitConfig;
  }
  qbo::PipelineOptions opts;
  opts.seed_override = seed;
  opts.threshold_override = threshold;
  opts.resume = resume;
  const auto result = qbo::run_pipeline(std::move(parsed), out, opts);
  for (const auto& p : result.artifacts) std::cout << p.string() << '\n';
  if (result.aborted) {
    std::cerr << "qbo run: at least one run aborted; see manifest.json\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& traces, const std::string& out, std::optional<double> threshold) {
  std::vector<qbo::TraceData> data;
  for (const auto& path : traces) data.push_back(qbo::read_trace(path));
  std::filesystem::create_directories(out);
  const auto files = qbo::write_report(out, data, threshold);
  for (const auto& p : files.written) std::cout << p.string() << '\n';
  return kExitOk;
}

int cmd_validate(const std::string& dataset, const std::string& config, const std::string& sites) {
  qbo::DesignSpace space;
  try {
    if (!config.empty()) {
      space = qbo::parse_run_config_file(config).run.space;
    } else if (!sites.empty()) {
      space = space_from_list(sites);
    } else {
      throw qbo::ConfigParseError(0, "sites", "give --config or --sites");
    }
  } catch (const qbo::Error& e) {
    std::cerr << "qbo validate-dataset: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto findings = qbo::validate_dataset(dataset, space);
  for (const auto& f : findings)
    std::cout << dataset << ':' << f.line << ": " << qbo::to_string(f.kind) << ": " << f.message << '\n';
  if (findings.empty()) {
    std::cout << dataset << ": ok\n";
    return kExitOk;
  }
  return kExitFindings;
}

struct SolveArgs {
  std::string qubo;
  std::string out;
  std::string backend = "exhaustive";
  std::size_t reads = 300;
  std::size_t sweeps = 1000;
  std::uint64_t seed = 0;
  double beta_start = 0;
  double beta_end = 0;
};

int cmd_solve(const SolveArgs& a) {
  qbo::SolverConfig cfg;
  try {
    cfg.backend = qbo::parse_backend(a.backend);
    if (cfg.backend == qbo::Backend::kExternal) throw qbo::InvalidArgument("solve cannot call the external backend");
  } catch (const qbo::Error& e) {
    std::cerr << "qbo solve: " << e.what() << '\n';
    return kExitConfig;
  }
  cfg.reads = a.reads;
  cfg.sweeps = a.sweeps;
  cfg.seed = a.seed;
  cfg.beta_start = a.beta_start;
  cfg.beta_end = a.beta_end;
  const auto pool = qbo::solve(qbo::read_qubo(a.qubo), cfg);
  std::ofstream os(a.out);
  if (!os) throw qbo::IoError("cannot write " + a.out);
  qbo::write_pool_csv(os, pool);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian optimization over categorical spaces with QUBO acquisition"};
  app.set_version_flag("--version", std::string(QBO_VERSION));
  app.require_subcommand(1);

  std::string config, out, dataset, sites;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  bool resume = false;
  std::vector<std::string> traces;
  SolveArgs solve_args;

  auto* run = app.add_subcommand("run", "run every configured sigma2 and the random baseline");
  run->add_option("--config", config, "run configuration file")->required();
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--threshold", threshold, "override the reporting threshold");
  run->add_flag("--resume", resume, "continue from traces already in the output directory");

  auto* report = app.add_subcommand("report", "regenerate report files from traces");
  report->add_option("--traces", traces, "trace files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", out, "output directory")->required();
  report->add_option("--threshold", threshold, "override the threshold recorded in the traces");

  auto* validate = app.add_subcommand("validate-dataset", "check a dataset CSV against a design space");
  validate->add_option("--dataset", dataset, "dataset CSV")->required();
  auto* vcfg = validate->add_option("--config", config, "take the space from a run configuration");
  validate->add_option("--sites", sites, "comma-separated site cardinalities")->excludes(vcfg);

  auto* solve = app.add_subcommand("solve", "minimize a QUBO file and write the sample pool");
  solve->add_option("--qubo", solve_args.qubo, "QUBO file")->required();
  solve->add_option("--out", solve_args.out, "pool CSV")->required();
  solve->add_option("--backend", solve_args.backend, "exhaustive or simulated_annealing");
  solve->add_option("--reads", solve_args.reads);
  solve->add_option("--sweeps", solve_args.sweeps);
  solve->add_option("--seed", solve_args.seed);
  solve->add_option("--beta-start", solve_args.beta_start);
  solve->add_option("--beta-end", solve_args.beta_end);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, out, seed, threshold, resume);
    if (*report) return cmd_report(traces, out, threshold);
    if (*validate) return cmd_validate(dataset, config, sites);
    if (*solve) return cmd_solve(solve_args);
  } catch (const qbo::ConfigParseError& e) {
    std::cerr << "qbo: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qbo: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}
