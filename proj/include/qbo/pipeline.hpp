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


#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qbo/config.hpp"
#include "qbo/dataset.hpp"
#include "qbo/driver.hpp"
#include "qbo/error.hpp"
#include "qbo/report.hpp"

namespace qbo {

#ifndef QBO_VERSION
#define QBO_VERSION "0.1.0"
#endif

struct PipelineOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<double> threshold_override;
  /// Continue runs whose trace files already exist in the output directory.
  bool resume = false;
};

struct PipelineResult {
  std::vector<std::filesystem::path> traces;
  std::vector<std::filesystem::path> artifacts;
  bool aborted = false;
};

inline std::filesystem::path trace_path(const std::filesystem::path& out, const std::string& label) {
  return out / "traces" / (label + ".jsonl");
}

/// Runs the full sweep, writing traces as loops finish, then regenerates
/// every report file from the traces on disk.
inline PipelineResult run_pipeline(ParsedConfig parsed, const std::filesystem::path& out,
                                   const PipelineOptions& options = {}) {
  namespace fs = std::filesystem;
  RunConfig& cfg = parsed.run;
  if (options.seed_override) cfg.master_seed = *options.seed_override;
  if (options.threshold_override) cfg.threshold = *options.threshold_override;
  cfg.validate();

  fs::create_directories(out / "traces");
  const auto objective = build_objective(cfg);
  const auto initial = make_initial_dataset(cfg, objective);
  {
    std::ofstream ds(out / "initial_dataset.csv");
    if (!ds) throw IoError("cannot write initial dataset");
    Dataset reported(initial.n_bits());
    for (const auto& row : initial) reported.append(row.x, objective.reported(row.y), 0);
    write_dataset_csv(ds, reported);
  }

  PipelineResult result;
  std::map<std::string, std::size_t> resumed_loops;
  std::vector<std::unique_ptr<TraceWriter>> writers;
  SweepOptions sweep_opts;
  sweep_opts.options_for = [&](const std::string& label, bool baseline, double sigma2) {
    const auto path = trace_path(out, label);
    result.traces.push_back(path);
    RunOptions ro;
    if (options.resume && fs::exists(path)) {
      auto previous = read_trace(path.string());
      if (!(previous.space == cfg.space) || previous.master_seed != cfg.master_seed)
        throw SchemaError("trace " + path.string() + " belongs to a different configuration");
      for (const auto& rec : previous.loops) {
        if (!rec.complete) break;
        ro.resume.push_back(rec);
      }
    }
    resumed_loops[label] = ro.resume.size();
    TraceData header;
    header.label = label;
    header.baseline = baseline;
    header.sigma2 = sigma2;
    header.lambda = cfg.lambda;
    header.threshold = cfg.threshold;
    header.orientation = objective.orientation();
    header.master_seed = cfg.master_seed;
    header.space = cfg.space;
    header.loops_planned = cfg.loops;
    header.batch_size = cfg.batch_size;
    header.initial = initial;
    writers.push_back(std::make_unique<TraceWriter>(path.string(), false));
    auto* writer = writers.back().get();
    writer->begin(header);
    for (const auto& rec : ro.resume) writer->loop(rec);
    ro.on_loop = [writer](const LoopRecord& rec) { writer->loop(rec); };
    return ro;
  };
  const auto sweep = run_sweep(cfg, objective, initial, sweep_opts);
  writers.clear();

  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : sweep.runs) {
    result.aborted = result.aborted || run.aborted;
    runs.push_back({{"label", run.label},
                    {"sigma2", run.baseline ? nlohmann::json() : nlohmann::json(run.sigma2)},
                    {"loops", run.loops.size()},
                    {"resumed_loops", resumed_loops[run.label]},
                    {"evaluations", run.evaluations},
                    {"solver_calls", run.solver_calls},
                    {"aborted", run.aborted},
                    {"abort_reason", run.abort_reason}});
  }

  std::vector<TraceData> traces;
  for (const auto& p : result.traces) traces.push_back(read_trace(p.string()));
  result.artifacts = write_report(out, traces).written;

  nlohmann::json config_echo = nlohmann::json::object();
  for (const auto& [key, value] : parsed.entries) config_echo[key] = value.first;
  nlohmann::json manifest = {{"schema", "qbo.manifest/1"},
                             {"version", QBO_VERSION},
                             {"compiler", __VERSION__},
                             {"master_seed", cfg.master_seed},
                             {"initial_data_seed", derive_seed(cfg.master_seed, {tag_of(Role::kInitialData)})},
                             {"objective_seed", cfg.objective.seed},
                             {"threshold", cfg.threshold},
                             {"config", config_echo},
                             {"runs", runs}};
  std::ofstream mf(out / "manifest.json");
  if (!mf) throw IoError("cannot write manifest");
  mf << manifest.dump(2) << '\n';
  result.artifacts.push_back(out / "manifest.json");
  return result;
}

}  // namespace qbo
