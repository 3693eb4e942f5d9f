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
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "qbo/csv.hpp"
#include "qbo/driver.hpp"
#include "qbo/error.hpp"
#include "qbo/objective.hpp"
#include "qbo/solver.hpp"

namespace qbo {

/// Run config file: one "key = value" per line, '#' starts a comment.
///
///   site = NAME:CARDINALITY        (repeat, in bit order; required)
///   lambda = 0.01
///   sigma2 = 0, 0.004, 0.008, 0.012
///   loops = 20
///   batch_size = 10
///   seed = 1                       (master seed)
///   threshold = 0.88
///   initial_size = 100             (random initial sample size)
///   initial_dataset = path.csv     (replaces the random initial sample)
///   objective = synthetic_qubo | synthetic_deceptive | tabular
///   objective.seed, objective.density, objective.noise, objective.scale,
///   objective.triples, objective.triple_weight, objective.table,
///   objective.orientation = minimize | maximize, objective.budget
///   solver = exhaustive | simulated_annealing | external
///   solver.reads, solver.sweeps, solver.beta_start, solver.beta_end,
///   solver.threads, solver.command
///
/// Relative paths are resolved against `base_dir` when one is given.
struct ParsedConfig {
  RunConfig run;
  /// Key -> (value, line) of every assignment, for echoing into manifests.
  std::map<std::string, std::pair<std::string, std::size_t>> entries;
};

namespace detail {

template <typename T>
T parse_number(const std::string& key, const std::string& value, std::size_t line) {
  T out{};
  bool ok = false;
  if constexpr (std::is_floating_point_v<T>)
    ok = csv::parse_double(value, out);
  else
    ok = csv::parse_int(value, out);
  if (!ok) throw ConfigParseError(line, key, "cannot parse '" + value + "' as a number");
  return out;
}

}  // namespace detail

inline ParsedConfig parse_run_config(std::istream& is, const std::string& base_dir = "") {
  ParsedConfig parsed;
  RunConfig& cfg = parsed.run;
  std::vector<std::pair<std::string, std::uint64_t>> sites;
  std::size_t sites_line = 0;
  auto resolve = [&](const std::string& p) {
    if (p.empty() || base_dir.empty() || p.front() == '/') return p;
    return (std::filesystem::path(base_dir) / p).string();
  };

  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    std::string line(csv::trim(raw.substr(0, hash)));
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigParseError(lineno, "", "expected 'key = value'");
    const std::string key(csv::trim(std::string_view(line).substr(0, eq)));
    const std::string value(csv::trim(std::string_view(line).substr(eq + 1)));
    if (key.empty()) throw ConfigParseError(lineno, "", "missing key");
    if (key != "site" && parsed.entries.contains(key))
      throw ConfigParseError(lineno, key, "duplicate key (first set on line " +
                                              std::to_string(parsed.entries[key].second) + ")");
    if (key != "site") parsed.entries[key] = {value, lineno};

    auto num_d = [&] { return detail::parse_number<double>(key, value, lineno); };
    auto num_u = [&] { return detail::parse_number<std::uint64_t>(key, value, lineno); };
    auto num_z = [&] { return detail::parse_number<std::size_t>(key, value, lineno); };
    try {
      if (key == "site") {
        auto colon = value.rfind(':');
        if (colon == std::string::npos) throw ConfigParseError(lineno, key, "expected NAME:CARDINALITY");
        const std::string name(csv::trim(std::string_view(value).substr(0, colon)));
        const auto k = detail::parse_number<std::uint64_t>(key, value.substr(colon + 1), lineno);
        if (name.empty()) throw ConfigParseError(lineno, key, "site name is empty");
        sites.emplace_back(name, k);
        parsed.entries["site." + std::to_string(sites.size())] = {value, lineno};
        if (!sites_line) sites_line = lineno;
        if (k < 2) throw ConfigParseError(lineno, key, "site '" + name + "' needs cardinality >= 2");
      } else if (key == "lambda") {
        cfg.lambda = num_d();
        if (!(cfg.lambda > 0)) throw ConfigParseError(lineno, key, "lambda must be > 0");
      } else if (key == "sigma2") {
        cfg.sigma2_grid.clear();
        for (const auto& tok : csv::split(value)) {
          const double s = detail::parse_number<double>(key, tok, lineno);
          if (!(s >= 0)) throw ConfigParseError(lineno, key, "sigma2 values must be >= 0");
          cfg.sigma2_grid.push_back(s);
        }
      } else if (key == "loops") {
        cfg.loops = num_z();
        if (cfg.loops < 1) throw ConfigParseError(lineno, key, "loops must be >= 1");
      } else if (key == "batch_size") {
        cfg.batch_size = num_z();
        if (cfg.batch_size < 1) throw ConfigParseError(lineno, key, "batch_size must be >= 1");
      } else if (key == "seed") {
        cfg.master_seed = num_u();
      } else if (key == "threshold") {
        cfg.threshold = num_d();
      } else if (key == "initial_size") {
        cfg.initial_size = num_z();
        if (cfg.initial_size < 1) throw ConfigParseError(lineno, key, "initial_size must be >= 1");
      } else if (key == "initial_dataset") {
        cfg.initial_dataset_path = resolve(value);
      } else if (key == "objective") {
        cfg.objective.kind = parse_objective_kind(value);
      } else if (key == "objective.seed") {
        cfg.objective.seed = num_u();
      } else if (key == "objective.density") {
        cfg.objective.params.density = num_d();
        if (!(cfg.objective.params.density >= 0 && cfg.objective.params.density <= 1))
          throw ConfigParseError(lineno, key, "density must lie in [0, 1]");
      } else if (key == "objective.noise") {
        cfg.objective.params.noise = num_d();
        if (!(cfg.objective.params.noise >= 0)) throw ConfigParseError(lineno, key, "noise must be >= 0");
      } else if (key == "objective.scale") {
        cfg.objective.params.scale = num_d();
      } else if (key == "objective.triples") {
        cfg.objective.params.triples = num_z();
      } else if (key == "objective.triple_weight") {
        cfg.objective.params.triple_weight = num_d();
      } else if (key == "objective.table") {
        cfg.objective.table_path = resolve(value);
      } else if (key == "objective.orientation") {
        cfg.objective.orientation = parse_orientation(value);
      } else if (key == "objective.budget") {
        cfg.objective.budget = num_z();
      } else if (key == "solver") {
        cfg.solver.backend = parse_backend(value);
      } else if (key == "solver.reads") {
        cfg.solver.reads = num_z();
        if (cfg.solver.reads < 1) throw ConfigParseError(lineno, key, "reads must be >= 1");
      } else if (key == "solver.sweeps") {
        cfg.solver.sweeps = num_z();
        if (cfg.solver.sweeps < 1) throw ConfigParseError(lineno, key, "sweeps must be >= 1");
      } else if (key == "solver.beta_start") {
        cfg.solver.beta_start = num_d();
      } else if (key == "solver.beta_end") {
        cfg.solver.beta_end = num_d();
      } else if (key == "solver.threads") {
        cfg.solver.threads = num_z();
      } else if (key == "solver.command") {
        cfg.solver.external_command = value;
      } else {
        throw ConfigParseError(lineno, key, "unknown key");
      }
    } catch (const ConfigParseError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigParseError(lineno, key, e.what());
    }
  }

  if (sites.empty()) throw ConfigParseError(0, "site", "at least one site is required");
  try {
    cfg.space = DesignSpace(sites);
  } catch (const Error& e) {
    throw ConfigParseError(sites_line, "site", e.what());
  }
  const bool explicit_beta = cfg.solver.beta_start != 0.0 || cfg.solver.beta_end != 0.0;
  if (explicit_beta && !(cfg.solver.beta_start > 0 && cfg.solver.beta_end > cfg.solver.beta_start)) {
    const auto it = parsed.entries.find("solver.beta_end");
    throw ConfigParseError(it == parsed.entries.end() ? 0 : it->second.second, "solver.beta_end",
                           "need 0 < beta_start < beta_end");
  }
  if (cfg.objective.kind == ObjectiveKind::kTabular && cfg.objective.table_path.empty())
    throw ConfigParseError(0, "objective.table", "tabular objective needs a table path");
  if (cfg.solver.backend == Backend::kExternal && cfg.solver.external_command.empty())
    throw ConfigParseError(0, "solver.command", "external solver needs a command");
  return parsed;
}

inline ParsedConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  return parse_run_config(in, std::filesystem::path(path).parent_path().string());
}

inline ParsedConfig parse_run_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_run_config(in);
}

}  // namespace qbo
