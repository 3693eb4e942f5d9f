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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbo/acquisition.hpp"
#include "qbo/csv.hpp"
#include "qbo/dataset.hpp"
#include "qbo/encoding.hpp"
#include "qbo/error.hpp"
#include "qbo/objective.hpp"
#include "qbo/seeding.hpp"
#include "qbo/solver.hpp"
#include "qbo/surrogate.hpp"

namespace qbo {

struct ObjectiveConfig {
  ObjectiveKind kind = ObjectiveKind::kSyntheticQubo;
  Orientation orientation = Orientation::kMinimize;
  std::uint64_t seed = 0;
  SyntheticParams params;
  std::string table_path;
  std::size_t budget = 0;
};

struct RunConfig {
  DesignSpace space;
  double lambda = 1e-2;
  std::vector<double> sigma2_grid{0.0, 4e-3, 8e-3, 12e-3};
  std::size_t loops = 20;
  std::size_t batch_size = 10;
  SolverConfig solver;
  ObjectiveConfig objective;
  /// Used when initial_dataset_path is empty: that many seeded random
  /// feasible points are evaluated before the first loop.
  std::size_t initial_size = 100;
  std::string initial_dataset_path;
  std::uint64_t master_seed = 0;
  /// Success cutoff on reported values.
  double threshold = 0.88;

  void validate() const {
    if (space.site_count() == 0) throw InvalidArgument("run config has no design space");
    if (!(lambda > 0)) throw InvalidArgument("lambda must be > 0");
    if (sigma2_grid.empty()) throw InvalidArgument("sigma2 grid is empty");
    for (double s : sigma2_grid)
      if (!(s >= 0)) throw InvalidArgument("sigma2 values must be >= 0");
    if (loops < 1) throw InvalidArgument("loops must be >= 1");
    if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    if (!std::isfinite(threshold)) throw InvalidArgument("threshold must be finite");
  }
};

struct Proposal {
  BitVector x;
  /// Acquisition energy; NaN for random proposals.
  double energy = std::numeric_limits<double>::quiet_NaN();
  /// Observed value, internal minimize convention.
  double y = 0.0;
};

struct LoopRecord {
  std::size_t loop = 0;
  std::uint64_t alpha_seed = 0;
  std::uint64_t alpha_hash = 0;
  /// In-sample R^2 of the mean predictor before this loop's points are
  /// added; NaN when the targets are constant.
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::vector<Proposal> proposals;
  /// Best internal value in the dataset after this loop.
  double best_so_far = 0.0;
  bool shortfall = false;
  /// False for the last record of a run aborted mid-batch.
  bool complete = true;
};

struct RunResult {
  std::string label;
  bool baseline = false;
  double sigma2 = 0.0;
  std::vector<LoopRecord> loops;
  Dataset dataset;
  std::size_t solver_calls = 0;
  std::size_t evaluations = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct RunOptions {
  /// Called after each loop (including an incomplete final one).
  std::function<void(const LoopRecord&)> on_loop;
  /// Complete loops from an interrupted run; they are replayed into the
  /// dataset and the run continues with the next loop.
  std::vector<LoopRecord> resume;
};

inline std::string run_label(double sigma2) { return "bo_sigma2_" + csv::format_double(sigma2); }
inline constexpr const char* kBaselineLabel = "baseline";

inline std::uint64_t fingerprint(const CoefficientSample& alpha) {
  std::uint64_t h = 1469598103934665603ull;
  for (Eigen::Index i = 0; i < alpha.values.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double v = alpha.values[i];
    std::memcpy(bytes, &v, sizeof v);
    for (auto b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline double best_value(const Dataset& data) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& row : data) best = std::min(best, row.y);
  return best;
}

inline Objective build_objective(const RunConfig& cfg) {
  const auto& oc = cfg.objective;
  std::optional<Objective> obj;
  if (oc.kind == ObjectiveKind::kTabular) {
    obj.emplace(read_tabular_objective(oc.table_path, cfg.space, oc.orientation));
  } else {
    obj.emplace(make_synthetic(oc.seed, cfg.space.total_bits(), oc.kind, oc.params, oc.orientation));
    obj->bind_space(cfg.space);
  }
  obj->set_budget(oc.budget);
  return *obj;
}

/// Initial data: read from the configured CSV (values in the user's
/// orientation), or a seeded random feasible sample evaluated through a
/// copy of the objective.
inline Dataset make_initial_dataset(const RunConfig& cfg, const Objective& objective) {
  if (!cfg.initial_dataset_path.empty()) {
    auto raw = read_dataset_csv(cfg.initial_dataset_path, cfg.space.total_bits());
    Dataset data(cfg.space.total_bits());
    for (const auto& row : raw) {
      if (!is_feasible(cfg.space, row.x)) throw InfeasiblePoint("initial dataset holds infeasible " + row.x.to_string());
      data.append(row.x, to_internal(objective.orientation(), row.y), 0);
    }
    if (data.empty()) throw InvalidArgument("initial dataset is empty");
    return data;
  }
  if (cfg.initial_size == 0) throw InvalidArgument("initial_size must be >= 1");
  Dataset empty(cfg.space.total_bits());
  auto batch = random_batch(cfg.space, empty, cfg.initial_size,
                            derive_seed(cfg.master_seed, {tag_of(Role::kInitialData)}));
  Objective eval(objective);
  eval.set_budget(0);
  Dataset data(cfg.space.total_bits());
  for (auto& x : batch.points) {
    const double y = eval.evaluate(x);
    data.append(std::move(x), y, 0);
  }
  return data;
}

namespace detail {

/// Drives the shared loop skeleton; `propose` returns the batch for a loop
/// and fills the alpha fields of the record.
template <typename Propose>
RunResult run_loops(const RunConfig& cfg, const Dataset& initial, Objective& objective, RunResult result,
                    const RunOptions& options, Propose&& propose) {
  cfg.validate();
  if (initial.empty()) throw InvalidArgument("initial dataset is empty");
  if (initial.n_bits() != cfg.space.total_bits()) throw LengthMismatch("initial dataset width differs from space");
  result.dataset = initial;

  std::size_t first_loop = 1;
  for (const auto& rec : options.resume) {
    if (!rec.complete) break;
    if (rec.loop != first_loop) throw SchemaError("resume records are not consecutive");
    for (const auto& p : rec.proposals) result.dataset.append(p.x, p.y, static_cast<int>(rec.loop));
    result.loops.push_back(rec);
    ++first_loop;
  }

  const std::size_t evals_at_start = objective.evaluations();
  std::size_t expected_evals = 0;
  for (std::size_t loop = first_loop; loop <= cfg.loops; ++loop) {
    LoopRecord rec;
    rec.loop = loop;
    const auto post = fit_posterior(result.dataset, cfg.lambda, result.baseline ? 0.0 : result.sigma2);
    try {
      rec.r2 = r_squared(post, result.dataset);
    } catch (const DegenerateTarget&) {
      rec.r2 = std::numeric_limits<double>::quiet_NaN();
    }

    BatchSelection batch = propose(loop, post, result, rec);
    rec.shortfall = batch.shortfall;

    for (std::size_t k = 0; k < batch.points.size(); ++k) {
      const auto& x = batch.points[k];
      if (!is_feasible(cfg.space, x)) throw InvariantViolation("proposed infeasible point " + x.to_string());
      if (result.dataset.contains(x)) throw InvariantViolation("proposed already-observed point " + x.to_string());
      double y = 0;
      try {
        y = objective.evaluate(x);
      } catch (const BudgetExceeded& e) {
        rec.complete = false;
        result.aborted = true;
        result.abort_reason = e.what();
        break;
      }
      ++expected_evals;
      result.dataset.append(x, y, static_cast<int>(loop));
      rec.proposals.push_back({x, k < batch.energies.size() ? batch.energies[k] : std::nan(""), y});
    }
    if (objective.evaluations() - evals_at_start != expected_evals)
      throw InvariantViolation("objective evaluation count does not match the number of evaluated proposals");
    rec.best_so_far = best_value(result.dataset);
    result.loops.push_back(rec);
    if (options.on_loop) options.on_loop(result.loops.back());
    if (result.aborted) break;
  }
  result.evaluations = objective.evaluations() - evals_at_start;
  return result;
}

}  // namespace detail

/// Thompson-sampling loop: fit, draw one coefficient sample, build the
/// penalized acquisition, solve, screen the top batch, evaluate, append.
inline RunResult run_bo(const RunConfig& cfg, double sigma2, const Dataset& initial, Objective& objective,
                        const RunOptions& options = {}) {
  if (!(sigma2 >= 0)) throw InvalidArgument("sigma2 must be >= 0");
  RunResult result;
  result.label = run_label(sigma2);
  result.sigma2 = sigma2;
  const auto penalties = build_penalty_spec(cfg.space);
  const std::size_t n = cfg.space.total_bits();
  auto propose = [&](std::size_t loop, const PosteriorModel& post, RunResult& res, LoopRecord& rec) {
    const auto run_seed = derive_seed(cfg.master_seed, {tag_of(Role::kBoRun), tag_of(sigma2), loop});
    rec.alpha_seed = derive_seed(run_seed, {tag_of(Role::kCoefficients)});
    Rng rng(rec.alpha_seed);
    const auto alpha = sample_coefficients(post, rng);
    if (sigma2 == 0.0 && alpha.values != post.mean())
      throw InvariantViolation("zero-variance sample differs from the posterior mean");
    rec.alpha_hash = fingerprint(alpha);
    const auto acquisition = build_acquisition(alpha, penalties, n);
    SolverConfig solver = cfg.solver;
    solver.seed = derive_seed(run_seed, {tag_of(Role::kSolver)});
    const auto pool = solve(acquisition, solver);
    ++res.solver_calls;
    return select_batch(pool, cfg.space, res.dataset, cfg.batch_size);
  };
  return detail::run_loops(cfg, initial, objective, std::move(result), options, propose);
}

/// Random-proposal baseline with the same accounting; the surrogate is still
/// fit each loop so its R^2 series is comparable.
inline RunResult run_baseline(const RunConfig& cfg, const Dataset& initial, Objective& objective,
                              const RunOptions& options = {}) {
  RunResult result;
  result.label = kBaselineLabel;
  result.baseline = true;
  result.sigma2 = std::numeric_limits<double>::quiet_NaN();
  auto propose = [&](std::size_t loop, const PosteriorModel&, RunResult& res, LoopRecord& rec) {
    rec.alpha_seed = derive_seed(cfg.master_seed, {tag_of(Role::kBaseline), loop, tag_of(Role::kRandomBatch)});
    return random_batch(cfg.space, res.dataset, cfg.batch_size, rec.alpha_seed);
  };
  return detail::run_loops(cfg, initial, objective, std::move(result), options, propose);
}

struct SweepResult {
  Dataset initial;
  std::vector<RunResult> runs;  // one per sigma2 in grid order, then the baseline
};

/// Per-run hooks for run_sweep, keyed by run label.
struct SweepOptions {
  std::function<RunOptions(const std::string& label, bool baseline, double sigma2)> options_for;
};

/// One BO run per sigma2 plus the baseline, all from the same initial data.
/// Each run gets its own copy of the objective, so budgets are per run.
inline SweepResult run_sweep(const RunConfig& cfg, const Objective& objective, const Dataset& initial,
                             const SweepOptions& options = {}) {
  cfg.validate();
  SweepResult sweep;
  sweep.initial = initial;
  for (double s2 : cfg.sigma2_grid) {
    Objective obj(objective);
    obj.reset_evaluations();
    const auto opts = options.options_for ? options.options_for(run_label(s2), false, s2) : RunOptions{};
    sweep.runs.push_back(run_bo(cfg, s2, initial, obj, opts));
  }
  Objective obj(objective);
  obj.reset_evaluations();
  const auto opts = options.options_for ? options.options_for(kBaselineLabel, true, std::nan("")) : RunOptions{};
  sweep.runs.push_back(run_baseline(cfg, initial, obj, opts));
  return sweep;
}

inline SweepResult run_sweep(const RunConfig& cfg, const Objective& objective, const SweepOptions& options = {}) {
  return run_sweep(cfg, objective, make_initial_dataset(cfg, objective), options);
}

}  // namespace qbo
