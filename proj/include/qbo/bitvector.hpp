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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "qbo/error.hpp"

namespace qbo {

/// Fixed-length assignment of binary variables x in {0,1}^N.
///
/// Ordering is lexicographic over the bit string with x_0 most significant,
/// which is the tie-break used everywhere candidates are ranked.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : bits_(n, 0) {}
  BitVector(std::initializer_list<int> bits) {
    bits_.reserve(bits.size());
    for (int b : bits) bits_.push_back(b ? 1 : 0);
  }
  explicit BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b ? 1 : 0;
  }

  /// Parses a string of '0'/'1' characters.
  static BitVector from_string(std::string_view s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1')
        throw InvalidArgument("bit string contains non-binary character: " + std::string(s));
      v.bits_[i] = s[i] == '1';
    }
    return v;
  }

  /// Bit i of the vector is bit i of the mask.
  static BitVector from_mask(std::uint64_t mask, std::size_t n) {
    BitVector v(n);
    for (std::size_t i = 0; i < n; ++i) v.bits_[i] = (mask >> i) & 1u;
    return v;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return bits_[i]; }
  void set(std::size_t i, bool value) { bits_.at(i) = value ? 1 : 0; }
  void flip(std::size_t i) { bits_.at(i) ^= 1u; }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  auto begin() const noexcept { return bits_.begin(); }
  auto end() const noexcept { return bits_.end(); }

  std::size_t count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) s[i] = '1';
    return s;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;
  friend std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

struct BitVectorHash {
  std::size_t operator()(const BitVector& v) const noexcept {
    // FNV-1a
    std::uint64_t h = 1469598103934665603ull;
    for (auto b : v) {
      h ^= b;
      h *= 1099511628211ull;
    }
    h ^= v.size();
    return static_cast<std::size_t>(h * 1099511628211ull);
  }
};

}  // namespace qbo
