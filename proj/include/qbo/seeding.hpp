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

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace qbo {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a path of
/// tags. Streams for different paths never depend on each other, so adding
/// a run or a loop leaves every other stream untouched.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = splitmix64(parent);
  for (auto tag : path) s = splitmix64(s ^ splitmix64(tag + 0x632be59bd9b4e019ull));
  return s;
}

inline std::uint64_t tag_of(double value) noexcept { return std::bit_cast<std::uint64_t>(value); }

/// Stream roles.
enum class Role : std::uint64_t {
  kInitialData = 1,
  kCoefficients = 2,
  kSolver = 3,
  kRandomBatch = 4,
  kBaseline = 5,
  kObjectiveNoise = 6,
  kBoRun = 7,
};

inline constexpr std::uint64_t tag_of(Role r) noexcept { return static_cast<std::uint64_t>(r); }

using Rng = std::mt19937_64;

}  // namespace qbo
