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
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbo/acquisition.hpp"
#include "qbo/bitvector.hpp"
#include "qbo/csv.hpp"
#include "qbo/encoding.hpp"
#include "qbo/error.hpp"
#include "qbo/seeding.hpp"

namespace qbo {

enum class ObjectiveKind { kSyntheticQubo, kSyntheticDeceptive, kTabular };
enum class Orientation { kMinimize, kMaximize };

inline std::string to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::kSyntheticQubo: return "synthetic_qubo";
    case ObjectiveKind::kSyntheticDeceptive: return "synthetic_deceptive";
    case ObjectiveKind::kTabular: return "tabular";
  }
  return "unknown";
}

inline ObjectiveKind parse_objective_kind(const std::string& s) {
  if (s == "synthetic_qubo") return ObjectiveKind::kSyntheticQubo;
  if (s == "synthetic_deceptive") return ObjectiveKind::kSyntheticDeceptive;
  if (s == "tabular") return ObjectiveKind::kTabular;
  throw InvalidArgument("unknown objective kind '" + s + "'");
}

inline std::string to_string(Orientation o) { return o == Orientation::kMaximize ? "maximize" : "minimize"; }

inline Orientation parse_orientation(const std::string& s) {
  if (s == "minimize") return Orientation::kMinimize;
  if (s == "maximize") return Orientation::kMaximize;
  throw InvalidArgument("orientation must be 'minimize' or 'maximize', got '" + s + "'");
}

/// Reported (user-facing) value from the internal minimize-convention value.
inline double to_reported(Orientation o, double internal) { return o == Orientation::kMaximize ? -internal : internal; }
inline double to_internal(Orientation o, double reported) { return o == Orientation::kMaximize ? -reported : reported; }

struct SyntheticParams {
  /// Probability that a pairwise coefficient is nonzero.
  double density = 0.3;
  /// Standard deviation of additive Gaussian observation noise.
  double noise = 0.0;
  /// Multiplies every planted coefficient.
  double scale = 1.0;
  /// Deceptive kind only: number of random bit triples and the weight of
  /// each product term, in units of scale.
  std::size_t triples = 1;
  double triple_weight = -4.0;
};

/// A black-box function of a bit vector. evaluate() returns values in the
/// internal minimize convention and counts every call against the budget.
class Objective {
 public:
  Objective(const Objective& other)
      : kind_(other.kind_),
        orientation_(other.orientation_),
        seed_(other.seed_),
        params_(other.params_),
        n_bits_(other.n_bits_),
        planted_(other.planted_),
        triples_(other.triples_),
        table_(other.table_),
        space_(other.space_),
        budget_(other.budget_),
        evaluations_(other.evaluations_.load()),
        noise_rng_(std::make_shared<Rng>(derive_seed(other.seed_, {tag_of(Role::kObjectiveNoise)}))) {}

  Objective& operator=(const Objective&) = delete;

  ObjectiveKind kind() const noexcept { return kind_; }
  Orientation orientation() const noexcept { return orientation_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const SyntheticParams& params() const noexcept { return params_; }
  std::size_t n_bits() const noexcept { return n_bits_; }
  const std::optional<DesignSpace>& space() const noexcept { return space_; }

  /// Planted quadratic part (synthetic kinds).
  const QuboProblem& planted() const noexcept { return planted_; }
  const std::vector<std::array<std::size_t, 3>>& triples() const noexcept { return triples_; }

  /// True when a tabular objective does not cover every feasible point.
  bool partial_coverage() const noexcept {
    return kind_ == ObjectiveKind::kTabular && space_ && table_ && table_->size() < space_->size();
  }

  /// Cap on evaluate() calls; 0 means unlimited.
  void set_budget(std::size_t cap) noexcept { budget_ = cap; }
  std::size_t budget() const noexcept { return budget_; }
  std::size_t evaluations() const noexcept { return evaluations_.load(); }
  void reset_evaluations() noexcept { evaluations_.store(0); }

  /// Restricts evaluation to feasible points of the space.
  void bind_space(DesignSpace space) {
    if (space.total_bits() != n_bits_) throw LengthMismatch("design space width differs from objective width");
    space_ = std::move(space);
  }

  /// Noise-free value in the user's orientation.
  double raw_value(const BitVector& x) const {
    if (x.size() != n_bits_)
      throw LengthMismatch("bit vector has length " + std::to_string(x.size()) + ", objective expects " +
                           std::to_string(n_bits_));
    if (kind_ == ObjectiveKind::kTabular) {
      auto d = decode(*space_, x);
      auto it = table_->find(d.indices);
      if (it == table_->end()) throw MissingEntry("no table entry for " + x.to_string());
      return it->second;
    }
    double v = energy(planted_, x);
    for (const auto& t : triples_)
      if (x[t[0]] && x[t[1]] && x[t[2]]) v += params_.triple_weight * params_.scale;
    return v;
  }

  /// Internal (minimize-convention) value; safe to call concurrently. Copies
  /// restart the noise stream, so each copy replays the same noise sequence.
  double evaluate(const BitVector& x) {
    if (space_ && !is_feasible(*space_, x)) throw InfeasiblePoint("objective called on infeasible " + x.to_string());
    double v = raw_value(x);
    auto count = evaluations_.load();
    do {
      if (budget_ != 0 && count >= budget_)
        throw BudgetExceeded("evaluation budget of " + std::to_string(budget_) + " exhausted");
    } while (!evaluations_.compare_exchange_weak(count, count + 1));
    if (params_.noise > 0.0 && kind_ != ObjectiveKind::kTabular) {
      std::lock_guard lock(*noise_mutex_);
      v += std::normal_distribution<double>(0.0, params_.noise)(*noise_rng_);
    }
    return to_internal(orientation_, v);
  }

  double reported(double internal) const { return to_reported(orientation_, internal); }

  static Objective make_synthetic(std::uint64_t seed, std::size_t n_bits, ObjectiveKind kind,
                                  const SyntheticParams& params, Orientation orientation = Orientation::kMinimize) {
    if (kind == ObjectiveKind::kTabular) throw InvalidArgument("make_synthetic needs a synthetic kind");
    if (n_bits < 2) throw InvalidArgument("synthetic objective needs at least 2 bits");
    if (!(params.density >= 0.0 && params.density <= 1.0))
      throw InvalidDensity("pairwise density must lie in [0, 1], got " + std::to_string(params.density));
    if (!(params.noise >= 0.0)) throw InvalidArgument("noise must be >= 0");
    if (kind == ObjectiveKind::kSyntheticDeceptive && n_bits < 3)
      throw InvalidArgument("deceptive objective needs at least 3 bits");

    Objective obj(kind, orientation, seed, params, n_bits);
    Rng rng(derive_seed(seed, {0}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::bernoulli_distribution active(params.density);
    obj.planted_ = QuboProblem(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) obj.planted_.linear[i] = params.scale * normal(rng);
    for (std::size_t i = 0; i < n_bits; ++i)
      for (std::size_t j = i + 1; j < n_bits; ++j) {
        const bool on = active(rng);
        const double v = normal(rng);
        if (on) obj.planted_.quadratic[{i, j}] = params.scale * v;
      }
    if (kind == ObjectiveKind::kSyntheticDeceptive) {
      std::vector<std::size_t> idx(n_bits);
      for (std::size_t t = 0; t < params.triples; ++t) {
        for (std::size_t i = 0; i < n_bits; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        std::array<std::size_t, 3> triple{idx[0], idx[1], idx[2]};
        std::sort(triple.begin(), triple.end());
        obj.triples_.push_back(triple);
      }
    }
    return obj;
  }

  /// Table of (site indices -> value) in the user's orientation.
  static Objective make_tabular(const DesignSpace& space, std::map<Assignment, double> table,
                                Orientation orientation = Orientation::kMinimize) {
    Objective obj(ObjectiveKind::kTabular, orientation, 0, SyntheticParams{}, space.total_bits());
    for (const auto& [a, _] : table)
      encode(space, std::span<const std::uint64_t>(a));  // validates the indices
    obj.table_ = std::make_shared<const std::map<Assignment, double>>(std::move(table));
    obj.space_ = space;
    return obj;
  }

 private:
  Objective(ObjectiveKind kind, Orientation orientation, std::uint64_t seed, const SyntheticParams& params,
            std::size_t n_bits)
      : kind_(kind),
        orientation_(orientation),
        seed_(seed),
        params_(params),
        n_bits_(n_bits),
        noise_rng_(std::make_shared<Rng>(derive_seed(seed, {tag_of(Role::kObjectiveNoise)}))) {}

  ObjectiveKind kind_;
  Orientation orientation_;
  std::uint64_t seed_;
  SyntheticParams params_;
  std::size_t n_bits_;
  QuboProblem planted_;
  std::vector<std::array<std::size_t, 3>> triples_;
  std::shared_ptr<const std::map<Assignment, double>> table_;
  std::optional<DesignSpace> space_;
  std::size_t budget_ = 0;
  std::atomic<std::size_t> evaluations_{0};
  std::shared_ptr<Rng> noise_rng_;
  std::shared_ptr<std::mutex> noise_mutex_ = std::make_shared<std::mutex>();
};

inline Objective make_synthetic(std::uint64_t seed, std::size_t n_bits, ObjectiveKind kind,
                                const SyntheticParams& params = {}, Orientation orientation = Orientation::kMinimize) {
  return Objective::make_synthetic(seed, n_bits, kind, params, orientation);
}

/// Tabular objective CSV: one column per site (header = site names, in
/// order) holding category indices, then a y column.
inline Objective read_tabular_objective(std::istream& is, const DesignSpace& space, Orientation orientation) {
  std::vector<std::string> expected;
  for (const auto& s : space.sites()) expected.push_back(s.name);
  expected.emplace_back("y");
  std::map<Assignment, double> table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::is_skippable(line)) continue;
    auto cols = csv::split(line);
    const auto where = "table line " + std::to_string(lineno) + ": ";
    if (!have_header) {
      if (cols != expected) throw SchemaError(where + "header must list the site names followed by y");
      have_header = true;
      continue;
    }
    if (cols.size() != expected.size()) throw SchemaError(where + "wrong column count");
    Assignment a(space.site_count());
    for (std::size_t s = 0; s < a.size(); ++s) {
      if (!csv::parse_int(cols[s], a[s]) || a[s] >= space.sites()[s].cardinality)
        throw SchemaError(where + "bad category index for site " + space.sites()[s].name);
    }
    double y = 0;
    if (!csv::parse_double(cols.back(), y)) throw SchemaError(where + "bad y value");
    if (!table.emplace(std::move(a), y).second) throw SchemaError(where + "duplicate entry");
  }
  if (!have_header) throw SchemaError("table has no header");
  return Objective::make_tabular(space, std::move(table), orientation);
}

inline Objective read_tabular_objective(const std::string& path, const DesignSpace& space, Orientation orientation) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table " + path);
  return read_tabular_objective(in, space, orientation);
}

}  // namespace qbo
