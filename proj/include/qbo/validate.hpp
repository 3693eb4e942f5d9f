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
#include <fstream>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "qbo/csv.hpp"
#include "qbo/dataset.hpp"
#include "qbo/encoding.hpp"
#include "qbo/error.hpp"

namespace qbo {

struct DatasetFinding {
  enum class Kind { kHeader, kColumns, kNonBinary, kBadValue, kInfeasible, kDuplicate };
  Kind kind;
  std::size_t line = 0;
  std::string message;
};

inline std::string to_string(DatasetFinding::Kind k) {
  switch (k) {
    case DatasetFinding::Kind::kHeader: return "header";
    case DatasetFinding::Kind::kColumns: return "columns";
    case DatasetFinding::Kind::kNonBinary: return "non-binary";
    case DatasetFinding::Kind::kBadValue: return "bad-value";
    case DatasetFinding::Kind::kInfeasible: return "infeasible";
    case DatasetFinding::Kind::kDuplicate: return "duplicate";
  }
  return "unknown";
}

/// Lenient scan of a dataset CSV: reports every problem instead of stopping
/// at the first one.
inline std::vector<DatasetFinding> validate_dataset(std::istream& is, const DesignSpace& space) {
  using Kind = DatasetFinding::Kind;
  std::vector<DatasetFinding> findings;
  const std::size_t n = space.total_bits();
  const auto expected = dataset_header(n);
  std::unordered_map<BitVector, std::size_t, BitVectorHash> first_seen;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::is_skippable(line)) continue;
    const auto cols = csv::split(line);
    if (!have_header) {
      have_header = true;
      if (cols != expected) {
        findings.push_back({Kind::kHeader, lineno,
                            "header has " + std::to_string(cols.size()) + " columns, expected x1..x" +
                                std::to_string(n) + ",y,loop"});
        if (cols.size() != expected.size()) return findings;
      }
      continue;
    }
    if (cols.size() != expected.size()) {
      findings.push_back({Kind::kColumns, lineno,
                          "expected " + std::to_string(expected.size()) + " columns, got " + std::to_string(cols.size())});
      continue;
    }
    BitVector x(n);
    bool binary = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (cols[i] != "0" && cols[i] != "1") {
        findings.push_back({Kind::kNonBinary, lineno, "column x" + std::to_string(i + 1) + " is '" + cols[i] + "'"});
        binary = false;
        break;
      }
      x.set(i, cols[i] == "1");
    }
    double y = 0;
    int loop = 0;
    if (!csv::parse_double(cols[n], y) || !csv::parse_int(cols[n + 1], loop))
      findings.push_back({Kind::kBadValue, lineno, "y or loop is not a number"});
    if (!binary) continue;
    const auto d = decode(space, x);
    for (std::size_t s = 0; s < d.indices.size(); ++s)
      if (d.indices[s] >= space.sites()[s].cardinality)
        findings.push_back({Kind::kInfeasible, lineno,
                            "site " + space.sites()[s].name + " has code " + std::to_string(d.indices[s]) +
                                " (cardinality " + std::to_string(space.sites()[s].cardinality) + ")"});
    auto [it, inserted] = first_seen.emplace(x, lineno);
    if (!inserted)
      findings.push_back({Kind::kDuplicate, lineno, "duplicates line " + std::to_string(it->second)});
  }
  if (!have_header) findings.push_back({Kind::kHeader, 0, "no header row"});
  return findings;
}

inline std::vector<DatasetFinding> validate_dataset(const std::string& path, const DesignSpace& space) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);
  return validate_dataset(in, space);
}

}  // namespace qbo
