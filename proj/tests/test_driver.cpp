#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "qbo/driver.hpp"

using namespace qbo;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.space = DesignSpace::from_cardinalities({6, 5, 4});  // 8 bits, 120 feasible
  cfg.loops = 4;
  cfg.batch_size = 5;
  cfg.initial_size = 30;
  cfg.master_seed = 77;
  cfg.sigma2_grid = {0.0, 4e-3};
  cfg.solver.backend = Backend::kExhaustive;
  cfg.objective.seed = 5;
  return cfg;
}

bool same_records(const std::vector<LoopRecord>& a, const std::vector<LoopRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto &x = a[i], &y = b[i];
    if (x.loop != y.loop || x.alpha_seed != y.alpha_seed || x.alpha_hash != y.alpha_hash ||
        x.best_so_far != y.best_so_far || x.shortfall != y.shortfall || x.complete != y.complete ||
        x.proposals.size() != y.proposals.size())
      return false;
    if (!(x.r2 == y.r2 || (std::isnan(x.r2) && std::isnan(y.r2)))) return false;
    for (std::size_t k = 0; k < x.proposals.size(); ++k)
      if (x.proposals[k].x != y.proposals[k].x || x.proposals[k].y != y.proposals[k].y) return false;
  }
  return true;
}

}  // namespace

TEST(InitialDataset, SeededFeasibleAndDistinct) {
  const auto cfg = small_config();
  const auto obj = build_objective(cfg);
  const auto a = make_initial_dataset(cfg, obj);
  const auto b = make_initial_dataset(cfg, obj);
  ASSERT_EQ(a.size(), 30u);
  std::set<BitVector> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(is_feasible(cfg.space, a[i].x));
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, obj.raw_value(a[i].x));
    EXPECT_EQ(a[i].loop, 0);
    seen.insert(a[i].x);
  }
  EXPECT_EQ(seen.size(), 30u);
  EXPECT_EQ(obj.evaluations(), 0u);
}

TEST(RunBo, ZeroVarianceRunIsDeterministic) {
  const auto cfg = small_config();
  auto obj = build_objective(cfg);
  const auto init = make_initial_dataset(cfg, obj);
  Objective o1(obj), o2(obj);
  const auto r1 = run_bo(cfg, 0.0, init, o1);
  const auto r2 = run_bo(cfg, 0.0, init, o2);
  EXPECT_TRUE(same_records(r1.loops, r2.loops));
  // alpha equals the posterior mean, so the hash matches a direct fit
  Dataset d = init;
  for (const auto& rec : r1.loops) {
    EXPECT_EQ(rec.alpha_hash, fingerprint(CoefficientSample{fit_posterior(d, cfg.lambda, 0.0).mean()}));
    for (const auto& p : rec.proposals) d.append(p.x, p.y, static_cast<int>(rec.loop));
  }
}

TEST(RunBo, DatasetGrowthAndAccounting) {
  const auto cfg = small_config();
  auto obj = build_objective(cfg);
  const auto init = make_initial_dataset(cfg, obj);
  Objective o(obj);
  const auto r = run_bo(cfg, 4e-3, init, o);
  ASSERT_EQ(r.loops.size(), cfg.loops);
  std::size_t added = 0;
  double best = best_value(init);
  std::set<BitVector> seen;
  for (const auto& row : init) seen.insert(row.x);
  for (const auto& rec : r.loops) {
    EXPECT_TRUE(rec.complete);
    EXPECT_EQ(rec.proposals.size() < cfg.batch_size, rec.shortfall);
    for (const auto& p : rec.proposals) {
      EXPECT_TRUE(seen.insert(p.x).second);
      EXPECT_TRUE(is_feasible(cfg.space, p.x));
      EXPECT_EQ(p.y, obj.raw_value(p.x));
      EXPECT_FALSE(std::isnan(p.energy));
      best = std::min(best, p.y);
    }
    added += rec.proposals.size();
    EXPECT_EQ(rec.best_so_far, best);
  }
  EXPECT_EQ(r.dataset.size(), init.size() + added);
  EXPECT_EQ(r.evaluations, added);
  EXPECT_EQ(o.evaluations(), added);
  EXPECT_EQ(r.solver_calls, cfg.loops);
  EXPECT_FALSE(r.aborted);
}

TEST(RunBo, ShortfallWhenSpaceRunsOut) {
  auto cfg = small_config();
  cfg.space = DesignSpace::from_cardinalities({3, 3});  // 9 feasible points
  cfg.initial_size = 4;
  cfg.batch_size = 3;
  cfg.loops = 3;
  auto obj = build_objective(cfg);
  const auto init = make_initial_dataset(cfg, obj);
  const auto r = run_bo(cfg, 0.0, init, obj);
  ASSERT_EQ(r.loops.size(), 3u);
  EXPECT_EQ(r.dataset.size(), 9u);
  EXPECT_TRUE(r.loops.back().shortfall);
  EXPECT_TRUE(r.loops.back().proposals.empty());
}

TEST(RunBaseline, NoSolverCalls) {
  const auto cfg = small_config();
  auto obj = build_objective(cfg);
  const auto init = make_initial_dataset(cfg, obj);
  const auto r = run_baseline(cfg, init, obj);
  EXPECT_TRUE(r.baseline);
  EXPECT_EQ(r.label, "baseline");
  EXPECT_EQ(r.solver_calls, 0u);
  EXPECT_EQ(r.dataset.size(), init.size() + cfg.loops * cfg.batch_size);
  for (const auto& rec : r.loops)
    for (const auto& p : rec.proposals) EXPECT_TRUE(std::isnan(p.energy));
}

TEST(RunBo, BudgetAbortLeavesPartialLoop) {
  auto cfg = small_config();
  cfg.objective.budget = 12;
  auto obj = build_objective(cfg);
  const auto init = make_initial_dataset(cfg, obj);
  std::vector<LoopRecord> seen;
  RunOptions opts;
  opts.on_loop = [&](const LoopRecord& rec) { seen.push_back(rec); };
  const auto r = run_bo(cfg, 0.0, init, obj, opts);
  EXPECT_TRUE(r.aborted);
  EXPECT_NE(r.abort_reason.find("budget"), std::string::npos);
  ASSERT_EQ(r.loops.size(), 3u);
  EXPECT_TRUE(r.loops[1].complete);
  EXPECT_FALSE(r.loops[2].complete);
  EXPECT_EQ(r.loops[2].proposals.size(), 2u);
  EXPECT_EQ(r.evaluations, 12u);
  EXPECT_EQ(r.dataset.size(), init.size() + 12);
  EXPECT_EQ(seen.size(), 3u);
}

TEST(RunBo, ResumeMatchesUninterruptedRun) {
  const auto cfg = small_config();
  auto obj = build_objective(cfg);
  const auto init = make_initial_dataset(cfg, obj);
  Objective full_obj(obj);
  const auto full = run_bo(cfg, 4e-3, init, full_obj);
  for (std::size_t cut = 0; cut <= cfg.loops; ++cut) {
    RunOptions opts;
    opts.resume.assign(full.loops.begin(), full.loops.begin() + cut);
    Objective o(obj);
    const auto resumed = run_bo(cfg, 4e-3, init, o, opts);
    EXPECT_TRUE(same_records(resumed.loops, full.loops)) << "cut " << cut;
    EXPECT_EQ(resumed.dataset.size(), full.dataset.size());
    EXPECT_EQ(resumed.solver_calls, cfg.loops - cut);
  }
  RunOptions bad;
  bad.resume.push_back(full.loops[1]);
  Objective o(obj);
  EXPECT_THROW(run_bo(cfg, 4e-3, init, o, bad), SchemaError);
}

TEST(RunSweep, OneRunPerSigmaPlusBaseline) {
  const auto cfg = small_config();
  const auto obj = build_objective(cfg);
  std::vector<std::string> labels;
  SweepOptions so;
  so.options_for = [&](const std::string& label, bool, double) {
    labels.push_back(label);
    return RunOptions{};
  };
  const auto sweep = run_sweep(cfg, obj, so);
  ASSERT_EQ(sweep.runs.size(), 3u);
  EXPECT_EQ(labels, (std::vector<std::string>{"bo_sigma2_0", "bo_sigma2_0.004", "baseline"}));
  for (const auto& run : sweep.runs) {
    for (std::size_t i = 0; i < sweep.initial.size(); ++i) EXPECT_EQ(run.dataset[i].x, sweep.initial[i].x);
    EXPECT_EQ(run.evaluations, cfg.loops * cfg.batch_size);
  }
}

TEST(RunConfig, Validation) {
  auto cfg = small_config();
  EXPECT_NO_THROW(cfg.validate());
  cfg.lambda = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.sigma2_grid = {-1};
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  auto obj = build_objective(small_config());
  const auto init = make_initial_dataset(small_config(), obj);
  EXPECT_THROW(run_bo(small_config(), -1.0, init, obj), InvalidArgument);
  EXPECT_THROW(run_bo(small_config(), 0.0, Dataset(8), obj), InvalidArgument);
}
