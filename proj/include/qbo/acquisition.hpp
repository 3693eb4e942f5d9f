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
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qbo/bitvector.hpp"
#include "qbo/csv.hpp"
#include "qbo/encoding.hpp"
#include "qbo/error.hpp"
#include "qbo/surrogate.hpp"

namespace qbo {

/// offset + sum_i linear[i] x_i + sum_{i<j} quadratic[(i,j)] x_i x_j
struct QuboProblem {
  std::size_t n_vars = 0;
  std::vector<double> linear;
  std::map<std::pair<std::size_t, std::size_t>, double> quadratic;
  double offset = 0.0;

  QuboProblem() = default;
  explicit QuboProblem(std::size_t n) : n_vars(n), linear(n, 0.0) {}

  /// Adds to the (i, j) coupling; i == j adds to the linear term.
  void add(std::size_t i, std::size_t j, double value) {
    if (i >= n_vars || j >= n_vars)
      throw IndexOutOfRange("QUBO index (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    if (i == j) {
      linear[i] += value;
      return;
    }
    if (i > j) std::swap(i, j);
    quadratic[{i, j}] += value;
  }

  double coupling(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    auto it = quadratic.find({i, j});
    return it == quadratic.end() ? 0.0 : it->second;
  }

  /// Symmetric coupling matrix with zero diagonal.
  Eigen::MatrixXd dense_couplings() const {
    const auto n = static_cast<Eigen::Index>(n_vars);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [key, v] : quadratic) {
      J(static_cast<Eigen::Index>(key.first), static_cast<Eigen::Index>(key.second)) = v;
      J(static_cast<Eigen::Index>(key.second), static_cast<Eigen::Index>(key.first)) = v;
    }
    return J;
  }
};

inline double energy(const QuboProblem& q, const BitVector& x) {
  if (x.size() != q.n_vars)
    throw LengthMismatch("bit vector has length " + std::to_string(x.size()) + ", QUBO has " +
                         std::to_string(q.n_vars) + " variables");
  double e = q.offset;
  for (std::size_t i = 0; i < q.n_vars; ++i)
    if (x[i]) e += q.linear[i];
  for (const auto& [key, v] : q.quadratic)
    if (x[key.first] && x[key.second]) e += v;
  return e;
}

/// Transcribes a coefficient sample into a QUBO and overwrites every penalty
/// pair's coupling with C = 2 * max(alpha). If that C would not exceed a
/// pair's own coefficient (only possible when alpha is mostly negative), the
/// pair gets 2 * max(alpha_pair, |min(alpha)|) + 1 instead.
inline QuboProblem build_acquisition(const CoefficientSample& alpha, const PenaltySpec& penalties,
                                     std::size_t n_vars) {
  const FeatureMap fm(n_vars);
  if (alpha.size() != fm.size())
    throw InconsistentDimensions("coefficient vector has length " + std::to_string(alpha.size()) +
                                 ", expected " + std::to_string(fm.size()) + " for " + std::to_string(n_vars) +
                                 " variables");
  QuboProblem q(n_vars);
  q.offset = alpha[0];
  for (std::size_t i = 0; i < n_vars; ++i) q.linear[i] = alpha[fm.linear_index(i)];
  for (std::size_t i = 0; i < n_vars; ++i)
    for (std::size_t j = i + 1; j < n_vars; ++j) q.quadratic[{i, j}] = alpha[fm.pair_index(i, j)];

  if (penalties.pair_terms.empty()) return q;
  const double max_alpha = alpha.values.maxCoeff();
  const double min_alpha = alpha.values.minCoeff();
  const double c = 2.0 * max_alpha;
  for (const auto& pair : penalties.pair_terms) {
    if (pair.i >= n_vars || pair.j >= n_vars || pair.i == pair.j)
      throw InconsistentDimensions("penalty pair (" + std::to_string(pair.i) + "," + std::to_string(pair.j) +
                                   ") does not fit " + std::to_string(n_vars) + " variables");
    const auto key = std::minmax(pair.i, pair.j);
    const double original = q.quadratic[{key.first, key.second}];
    q.quadratic[{key.first, key.second}] =
        c < original ? 2.0 * std::max(original, std::abs(min_alpha)) + 1.0 : c;
  }
  return q;
}

inline constexpr const char* kQuboSchema = "# schema: qbo.qubo/1";

/// Sparse interchange text: "n_vars", then "i j value" lines (i == j for
/// linear terms), then the offset alone on the last line.
inline void write_qubo(std::ostream& os, const QuboProblem& q) {
  os << kQuboSchema << '\n' << q.n_vars << '\n';
  for (std::size_t i = 0; i < q.n_vars; ++i)
    if (q.linear[i] != 0.0) os << i << ' ' << i << ' ' << csv::format_double(q.linear[i]) << '\n';
  for (const auto& [key, v] : q.quadratic)
    if (v != 0.0) os << key.first << ' ' << key.second << ' ' << csv::format_double(v) << '\n';
  os << csv::format_double(q.offset) << '\n';
}

inline QuboProblem read_qubo(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool have_n = false;
  bool have_offset = false;
  QuboProblem q;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::is_skippable(line)) continue;
    const auto where = "QUBO line " + std::to_string(lineno) + ": ";
    if (have_offset) throw SchemaError(where + "content after the offset line");
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (!have_n) {
      std::size_t n = 0;
      if (tok.size() != 1 || !csv::parse_int(tok[0], n)) throw SchemaError(where + "expected n_vars");
      q = QuboProblem(n);
      have_n = true;
    } else if (tok.size() == 3) {
      std::size_t i = 0, j = 0;
      double v = 0;
      if (!csv::parse_int(tok[0], i) || !csv::parse_int(tok[1], j) || !csv::parse_double(tok[2], v))
        throw SchemaError(where + "expected 'i j value'");
      if (i >= q.n_vars || j >= q.n_vars) throw SchemaError(where + "index out of range");
      q.add(i, j, v);
    } else if (tok.size() == 1) {
      if (!csv::parse_double(tok[0], q.offset)) throw SchemaError(where + "bad offset");
      have_offset = true;
    } else {
      throw SchemaError(where + "expected 'i j value' or a trailing offset");
    }
  }
  if (!have_n) throw SchemaError("QUBO file is empty");
  return q;
}

inline QuboProblem read_qubo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open QUBO file " + path);
  return read_qubo(in);
}

inline void write_qubo(const std::string& path, const QuboProblem& q) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write QUBO file " + path);
  write_qubo(out, q);
}

}  // namespace qbo
