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
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "qbo/bitvector.hpp"
#include "qbo/csv.hpp"
#include "qbo/error.hpp"

namespace qbo {

struct Observation {
  BitVector x;
  double y = 0.0;
  /// 0 marks initial data; loop l >= 1 marks points added in that loop.
  int loop = 0;
};

/// Append-only set of observations, keyed on the bit vector.
class Dataset {
 public:
  explicit Dataset(std::size_t n_bits = 0) : n_bits_(n_bits) {}

  std::size_t n_bits() const noexcept { return n_bits_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const std::vector<Observation>& rows() const noexcept { return rows_; }
  const Observation& operator[](std::size_t i) const { return rows_[i]; }
  auto begin() const noexcept { return rows_.begin(); }
  auto end() const noexcept { return rows_.end(); }

  bool contains(const BitVector& x) const { return index_.contains(x); }

  void append(BitVector x, double y, int loop = 0) {
    if (x.size() != n_bits_)
      throw LengthMismatch("observation has " + std::to_string(x.size()) + " bits, dataset holds " +
                           std::to_string(n_bits_));
    if (index_.contains(x)) throw DuplicateRow("duplicate observation " + x.to_string());
    index_.insert(x);
    rows_.push_back({std::move(x), y, loop});
  }

  std::vector<double> targets() const {
    std::vector<double> y;
    y.reserve(rows_.size());
    for (const auto& r : rows_) y.push_back(r.y);
    return y;
  }

 private:
  std::size_t n_bits_;
  std::vector<Observation> rows_;
  std::unordered_set<BitVector, BitVectorHash> index_;
};

inline constexpr const char* kDatasetSchema = "# schema: qbo.dataset/1";

/// Columns x1..xN, y, loop; header row mandatory.
inline void write_dataset_csv(std::ostream& os, const Dataset& data) {
  os << kDatasetSchema << '\n';
  for (std::size_t i = 0; i < data.n_bits(); ++i) os << 'x' << (i + 1) << ',';
  os << "y,loop\n";
  for (const auto& row : data) {
    for (auto b : row.x) os << int(b) << ',';
    os << csv::format_double(row.y) << ',' << row.loop << '\n';
  }
}

inline std::vector<std::string> dataset_header(std::size_t n_bits) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < n_bits; ++i) h.push_back("x" + std::to_string(i + 1));
  h.emplace_back("y");
  h.emplace_back("loop");
  return h;
}

/// Strict reader: any malformed or duplicate row is an error.
inline Dataset read_dataset_csv(std::istream& is, std::size_t n_bits) {
  Dataset data(n_bits);
  const auto expected = dataset_header(n_bits);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (csv::is_skippable(line)) continue;
    auto cols = csv::split(line);
    if (!have_header) {
      if (cols != expected)
        throw SchemaError("dataset line " + std::to_string(lineno) + ": header does not match x1..x" +
                          std::to_string(n_bits) + ",y,loop");
      have_header = true;
      continue;
    }
    if (cols.size() != expected.size())
      throw SchemaError("dataset line " + std::to_string(lineno) + ": expected " +
                        std::to_string(expected.size()) + " columns, got " + std::to_string(cols.size()));
    BitVector x(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
      if (cols[i] != "0" && cols[i] != "1")
        throw SchemaError("dataset line " + std::to_string(lineno) + ": non-binary value in column x" +
                          std::to_string(i + 1));
      x.set(i, cols[i] == "1");
    }
    double y = 0;
    int loop = 0;
    if (!csv::parse_double(cols[n_bits], y) || !csv::parse_int(cols[n_bits + 1], loop))
      throw SchemaError("dataset line " + std::to_string(lineno) + ": bad y or loop value");
    try {
      data.append(std::move(x), y, loop);
    } catch (const DuplicateRow& e) {
      throw DuplicateRow("dataset line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw SchemaError("dataset has no header row");
  return data;
}

inline Dataset read_dataset_csv(const std::string& path, std::size_t n_bits) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path);
  return read_dataset_csv(in, n_bits);
}

}  // namespace qbo
