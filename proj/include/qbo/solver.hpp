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

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qbo/acquisition.hpp"
#include "qbo/bitvector.hpp"
#include "qbo/csv.hpp"
#include "qbo/dataset.hpp"
#include "qbo/encoding.hpp"
#include "qbo/error.hpp"
#include "qbo/seeding.hpp"

namespace qbo {

enum class Backend { kExhaustive, kSimulatedAnnealing, kExternal };

inline std::string to_string(Backend b) {
  switch (b) {
    case Backend::kExhaustive: return "exhaustive";
    case Backend::kSimulatedAnnealing: return "simulated_annealing";
    case Backend::kExternal: return "external";
  }
  return "unknown";
}

inline Backend parse_backend(const std::string& s) {
  if (s == "exhaustive") return Backend::kExhaustive;
  if (s == "simulated_annealing" || s == "sa") return Backend::kSimulatedAnnealing;
  if (s == "external" || s == "external_adapter") return Backend::kExternal;
  throw InvalidArgument("unknown solver backend '" + s + "'");
}

struct PoolEntry {
  BitVector x;
  double energy = 0.0;
  std::size_t multiplicity = 1;
};

/// Distinct candidate states sorted by energy, ties broken by bit string.
struct SamplePool {
  std::vector<PoolEntry> entries;
  std::string backend;
  std::size_t reads = 0;
  std::size_t sweeps = 0;
  double beta_start = 0.0;
  double beta_end = 0.0;
  bool enumerated = false;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
  const PoolEntry& best() const { return entries.front(); }
};

struct SolverConfig;
using ExternalSampler = std::function<SamplePool(const QuboProblem&, const SolverConfig&)>;

struct SolverConfig {
  Backend backend = Backend::kSimulatedAnnealing;
  std::size_t reads = 300;
  std::size_t sweeps = 1000;
  /// Geometric inverse-temperature schedule. Leaving both at 0 derives the
  /// range from the problem's coefficient magnitudes.
  double beta_start = 0.0;
  double beta_end = 0.0;
  std::uint64_t seed = 0;
  /// 0 uses std::thread::hardware_concurrency().
  std::size_t threads = 0;
  /// Shell command for the external backend; "{qubo}" and "{pool}" are
  /// replaced with the QUBO input path and the pool CSV output path.
  std::string external_command;
  /// In-process alternative to external_command.
  ExternalSampler external_sampler;
};

inline constexpr std::size_t kMaxExhaustiveVars = 30;

inline std::size_t exhaustive_pool_cap(std::size_t reads) { return std::max<std::size_t>(3000, 10 * reads); }

namespace detail {

inline bool pool_less(const PoolEntry& a, const PoolEntry& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  return a.x < b.x;
}

/// Merges duplicate states, re-evaluates energies exactly and sorts.
inline std::vector<PoolEntry> finalize_entries(const QuboProblem& q, std::vector<PoolEntry> raw) {
  std::map<BitVector, std::size_t> merged;
  for (auto& e : raw) merged[std::move(e.x)] += e.multiplicity;
  std::vector<PoolEntry> out;
  out.reserve(merged.size());
  for (auto& [x, mult] : merged) out.push_back({x, energy(q, x), mult});
  std::sort(out.begin(), out.end(), pool_less);
  return out;
}

inline std::vector<double> dense_rows(const QuboProblem& q) {
  const std::size_t n = q.n_vars;
  std::vector<double> J(n * n, 0.0);
  for (const auto& [key, v] : q.quadratic) {
    J[key.first * n + key.second] += v;
    J[key.second * n + key.first] += v;
  }
  return J;
}

inline SamplePool solve_exhaustive(const QuboProblem& q, const SolverConfig& cfg) {
  const std::size_t n = q.n_vars;
  if (n > kMaxExhaustiveVars)
    throw TooLarge("exhaustive backend supports at most " + std::to_string(kMaxExhaustiveVars) +
                   " variables, got " + std::to_string(n));
  const auto J = dense_rows(q);
  const std::size_t cap = exhaustive_pool_cap(cfg.reads);

  // Gray-code walk: field[i] is the energy change of setting x_i from 0 to 1.
  std::vector<double> field(q.linear);
  std::vector<std::uint8_t> x(n, 0);
  double e = q.offset;
  std::uint64_t lex = 0;  // x_0 is the most significant bit

  using Key = std::pair<double, std::uint64_t>;
  std::priority_queue<Key> heap;
  auto offer = [&](double energy_value, std::uint64_t key) {
    if (heap.size() < cap) {
      heap.emplace(energy_value, key);
    } else if (Key{energy_value, key} < heap.top()) {
      heap.pop();
      heap.emplace(energy_value, key);
    }
  };
  offer(e, lex);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto i = static_cast<std::size_t>(std::countr_zero(k));
    const double sign = x[i] ? -1.0 : 1.0;
    e += sign * field[i];
    x[i] ^= 1u;
    lex ^= std::uint64_t{1} << (n - 1 - i);
    const double* row = &J[i * n];
    for (std::size_t j = 0; j < n; ++j) field[j] += sign * row[j];
    offer(e, lex);
  }

  std::vector<PoolEntry> raw;
  raw.reserve(heap.size());
  while (!heap.empty()) {
    BitVector bv(n);
    const auto key = heap.top().second;
    for (std::size_t b = 0; b < n; ++b) bv.set(b, (key >> (n - 1 - b)) & 1u);
    raw.push_back({std::move(bv), 0.0, 1});
    heap.pop();
  }
  SamplePool pool;
  pool.entries = finalize_entries(q, std::move(raw));
  pool.backend = to_string(Backend::kExhaustive);
  pool.reads = cfg.reads;
  pool.enumerated = true;
  return pool;
}

/// Hot end accepts the largest possible uphill flip with probability 1/2;
/// cold end accepts the smallest nonzero one with probability 1/100.
inline std::pair<double, double> auto_beta_range(const QuboProblem& q) {
  const std::size_t n = q.n_vars;
  std::vector<double> reach(n, 0.0);
  double min_delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    reach[i] += std::abs(q.linear[i]);
    if (q.linear[i] != 0.0) min_delta = std::min(min_delta, std::abs(q.linear[i]));
  }
  for (const auto& [key, v] : q.quadratic) {
    reach[key.first] += std::abs(v);
    reach[key.second] += std::abs(v);
    if (v != 0.0) min_delta = std::min(min_delta, std::abs(v));
  }
  const double max_delta = n ? *std::max_element(reach.begin(), reach.end()) : 0.0;
  if (!(max_delta > 0.0)) return {0.1, 1.0};
  min_delta = std::max(min_delta, max_delta * 1e-9);
  const double hot = std::log(2.0) / max_delta;
  double cold = std::log(100.0) / min_delta;
  if (!(cold > hot)) cold = hot * 10.0;
  return {hot, cold};
}

inline void anneal_one(const QuboProblem& q, const std::vector<double>& J, double beta_start, double beta_end,
                       std::size_t sweeps, std::uint64_t seed, std::vector<std::uint8_t>& x) {
  const std::size_t n = q.n_vars;
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  x.assign(n, 0);
  for (auto& b : x) b = coin(rng) ? 1 : 0;
  std::vector<double> field(q.linear);
  for (std::size_t i = 0; i < n; ++i)
    if (x[i])
      for (std::size_t j = 0; j < n; ++j) field[j] += J[i * n + j];

  const double ratio = sweeps > 1 ? std::pow(beta_end / beta_start, 1.0 / double(sweeps - 1)) : 1.0;
  double beta = sweeps > 1 ? beta_start : beta_end;
  for (std::size_t s = 0; s < sweeps; ++s, beta *= ratio) {
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = x[i] ? -field[i] : field[i];
      if (delta > 0.0 && unit(rng) >= std::exp(-beta * delta)) continue;
      const double sign = x[i] ? -1.0 : 1.0;
      x[i] ^= 1u;
      const double* row = &J[i * n];
      for (std::size_t j = 0; j < n; ++j) field[j] += sign * row[j];
    }
  }
}

inline SamplePool solve_annealing(const QuboProblem& q, const SolverConfig& cfg) {
  double beta_start = cfg.beta_start;
  double beta_end = cfg.beta_end;
  if (beta_start == 0.0 && beta_end == 0.0) {
    std::tie(beta_start, beta_end) = auto_beta_range(q);
  } else if (!(beta_start > 0.0) || !(beta_end > beta_start) || !std::isfinite(beta_end)) {
    throw InvalidSchedule("annealing schedule needs 0 < beta_start < beta_end");
  }
  if (cfg.sweeps == 0) throw InvalidSchedule("annealing needs at least one sweep");

  const auto J = dense_rows(q);
  std::vector<std::vector<std::uint8_t>> states(cfg.reads);
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.reads);

  // Each read owns its seed, so the result does not depend on scheduling.
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t r = first; r < cfg.reads; r += stride)
      anneal_one(q, J, beta_start, beta_end, cfg.sweeps, derive_seed(cfg.seed, {r}), states[r]);
  };
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }

  std::vector<PoolEntry> raw;
  raw.reserve(cfg.reads);
  for (auto& s : states) raw.push_back({BitVector(std::move(s)), 0.0, 1});
  SamplePool pool;
  pool.entries = finalize_entries(q, std::move(raw));
  pool.backend = to_string(Backend::kSimulatedAnnealing);
  pool.reads = cfg.reads;
  pool.sweeps = cfg.sweeps;
  pool.beta_start = beta_start;
  pool.beta_end = beta_end;
  return pool;
}

}  // namespace detail

inline constexpr const char* kPoolSchema = "# schema: qbo.pool/1";

inline void write_pool_csv(std::ostream& os, const SamplePool& pool) {
  os << kPoolSchema << '\n' << "x,energy,multiplicity\n";
  for (const auto& e : pool.entries)
    os << e.x.to_string() << ',' << csv::format_double(e.energy) << ',' << e.multiplicity << '\n';
}

/// Reads the pool CSV shape. Energies are taken as written; callers that
/// own the problem should re-evaluate them.
inline SamplePool read_pool_csv(std::istream& is) {
  SamplePool pool;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::is_skippable(line)) continue;
    auto cols = csv::split(line);
    const auto where = "pool line " + std::to_string(lineno) + ": ";
    if (!have_header) {
      if (cols != std::vector<std::string>{"x", "energy", "multiplicity"})
        throw SchemaError(where + "expected header x,energy,multiplicity");
      have_header = true;
      continue;
    }
    if (cols.size() != 3) throw SchemaError(where + "expected 3 columns");
    PoolEntry e;
    try {
      e.x = BitVector::from_string(cols[0]);
    } catch (const InvalidArgument&) {
      throw SchemaError(where + "bad bit string");
    }
    if (!csv::parse_double(cols[1], e.energy) || !csv::parse_int(cols[2], e.multiplicity))
      throw SchemaError(where + "bad energy or multiplicity");
    pool.entries.push_back(std::move(e));
  }
  if (!have_header) throw SchemaError("pool file has no header");
  return pool;
}

namespace detail {

inline SamplePool solve_external(const QuboProblem& q, const SolverConfig& cfg) {
  SamplePool returned;
  if (cfg.external_sampler) {
    returned = cfg.external_sampler(q, cfg);
  } else {
    if (cfg.external_command.empty())
      throw InvalidArgument("external backend needs external_command or external_sampler");
    static std::atomic<std::uint64_t> counter{0};
    namespace fs = std::filesystem;
    const auto stem = "qbo-ext-" + std::to_string(splitmix64(cfg.seed ^ std::uint64_t(
                                       std::hash<std::thread::id>{}(std::this_thread::get_id())))) +
                      "-" + std::to_string(counter++);
    const auto qubo_path = fs::temp_directory_path() / (stem + ".qubo");
    const auto pool_path = fs::temp_directory_path() / (stem + ".csv");
    write_qubo(qubo_path.string(), q);
    std::string cmd = cfg.external_command;
    auto replace = [&cmd](const std::string& key, const std::string& value) {
      for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size()))
        cmd.replace(pos, key.size(), value);
    };
    replace("{qubo}", qubo_path.string());
    replace("{pool}", pool_path.string());
    const int status = std::system(cmd.c_str());
    std::error_code ec;
    fs::remove(qubo_path, ec);
    if (status != 0) {
      fs::remove(pool_path, ec);
      throw ExternalSolverError("external solver command failed with status " + std::to_string(status));
    }
    std::ifstream in(pool_path);
    if (!in) throw ExternalSolverError("external solver produced no pool file");
    returned = read_pool_csv(in);
    in.close();
    fs::remove(pool_path, ec);
  }
  for (const auto& e : returned.entries)
    if (e.x.size() != q.n_vars) throw ExternalSolverError("external solver returned a state of wrong length");
  SamplePool pool;
  pool.entries = finalize_entries(q, std::move(returned.entries));
  pool.backend = to_string(Backend::kExternal);
  pool.reads = cfg.reads;
  return pool;
}

}  // namespace detail

/// Minimizes q and returns the ranked pool of distinct states found.
inline SamplePool solve(const QuboProblem& q, const SolverConfig& cfg) {
  if (cfg.reads == 0) throw InvalidArgument("solver needs reads >= 1");
  if (q.linear.size() != q.n_vars) throw InconsistentDimensions("QUBO linear term count differs from n_vars");
  switch (cfg.backend) {
    case Backend::kExhaustive: return detail::solve_exhaustive(q, cfg);
    case Backend::kSimulatedAnnealing: return detail::solve_annealing(q, cfg);
    case Backend::kExternal: return detail::solve_external(q, cfg);
  }
  throw InvalidArgument("unknown backend");
}

struct BatchSelection {
  std::vector<BitVector> points;
  /// Acquisition energy of each selected point; empty for random batches.
  std::vector<double> energies;
  bool shortfall = false;
};

/// Lowest-energy pool entries that are feasible, unseen in the dataset and
/// not repeated within the pool.
inline BatchSelection select_batch(const SamplePool& pool, const DesignSpace& space, const Dataset& data,
                                   std::size_t batch_size) {
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  BatchSelection out;
  std::unordered_set<BitVector, BitVectorHash> taken;
  for (const auto& e : pool.entries) {
    if (out.points.size() == batch_size) break;
    if (!is_feasible(space, e.x) || data.contains(e.x) || taken.contains(e.x)) continue;
    taken.insert(e.x);
    out.points.push_back(e.x);
    out.energies.push_back(e.energy);
  }
  out.shortfall = out.points.size() < batch_size;
  return out;
}

/// Uniform feasible assignments, distinct and disjoint from the dataset.
inline BatchSelection random_batch(const DesignSpace& space, const Dataset& data, std::size_t batch_size,
                                   std::uint64_t seed) {
  if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
  std::uint64_t seen_feasible = 0;
  for (const auto& row : data)
    if (row.x.size() == space.total_bits() && is_feasible(space, row.x)) ++seen_feasible;
  const std::uint64_t remaining = space.size() - seen_feasible;
  if (remaining < batch_size)
    throw SpaceExhausted("only " + std::to_string(remaining) + " unexplored feasible points remain, " +
                         std::to_string(batch_size) + " requested");

  Rng rng(seed);
  BatchSelection out;
  std::unordered_set<BitVector, BitVectorHash> taken;
  Assignment a(space.site_count());
  while (out.points.size() < batch_size) {
    for (std::size_t s = 0; s < space.site_count(); ++s)
      a[s] = std::uniform_int_distribution<std::uint64_t>(0, space.sites()[s].cardinality - 1)(rng);
    auto x = encode(space, a);
    if (data.contains(x) || taken.contains(x)) continue;
    taken.insert(x);
    out.points.push_back(std::move(x));
  }
  return out;
}

}  // namespace qbo
