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
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbo/bitvector.hpp"
#include "qbo/error.hpp"

namespace qbo {

/// Largest supported cardinality of a single site. Penalty synthesis
/// enumerates the infeasible codes of a site, so this bounds its cost.
inline constexpr std::uint64_t kMaxSiteCardinality = std::uint64_t{1} << 20;

/// One categorical site: valid codes are 0..cardinality-1, stored in
/// ceil(log2(cardinality)) bits.
struct SiteSpec {
  std::string name;
  std::uint64_t cardinality = 0;
  std::size_t bits = 0;

  /// Number of representable codes, 2^bits.
  std::uint64_t code_count() const noexcept { return std::uint64_t{1} << bits; }
  bool has_infeasible_codes() const noexcept { return cardinality < code_count(); }
};

inline std::size_t bits_for_cardinality(std::uint64_t k) {
  std::size_t b = 0;
  while ((std::uint64_t{1} << b) < k) ++b;
  return b;
}

/// Ordered list of categorical sites and the packed bit layout they imply.
/// Site i occupies bits [offset(i), offset(i) + sites()[i].bits), most
/// significant bit first.
class DesignSpace {
 public:
  DesignSpace() = default;

  explicit DesignSpace(const std::vector<std::pair<std::string, std::uint64_t>>& sites) {
    sites_.reserve(sites.size());
    std::uint64_t size = 1;
    for (const auto& [name, k] : sites) {
      if (k < 2)
        throw InvalidArgument("site '" + name + "' has cardinality " + std::to_string(k) +
                              "; every site needs at least 2 categories");
      if (k > kMaxSiteCardinality)
        throw InvalidArgument("site '" + name + "' cardinality exceeds " +
                              std::to_string(kMaxSiteCardinality));
      if (size > std::numeric_limits<std::uint64_t>::max() / k)
        throw InvalidArgument("design space size overflows a 64-bit count");
      size *= k;
      SiteSpec spec{name, k, bits_for_cardinality(k)};
      offsets_.push_back(total_bits_);
      total_bits_ += spec.bits;
      sites_.push_back(std::move(spec));
    }
    if (sites_.empty()) throw InvalidArgument("design space needs at least one site");
    size_ = size;
  }

  /// Unnamed sites, labelled R1, R2, ...
  static DesignSpace from_cardinalities(std::span<const std::uint64_t> ks) {
    std::vector<std::pair<std::string, std::uint64_t>> sites;
    for (std::size_t i = 0; i < ks.size(); ++i) sites.emplace_back("R" + std::to_string(i + 1), ks[i]);
    return DesignSpace(sites);
  }
  static DesignSpace from_cardinalities(std::initializer_list<std::uint64_t> ks) {
    return from_cardinalities(std::span<const std::uint64_t>(ks.begin(), ks.size()));
  }

  const std::vector<SiteSpec>& sites() const noexcept { return sites_; }
  std::size_t site_count() const noexcept { return sites_.size(); }
  std::size_t total_bits() const noexcept { return total_bits_; }
  std::size_t offset(std::size_t site) const { return offsets_.at(site); }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }

  /// Number of feasible assignments, the product of all cardinalities.
  std::uint64_t size() const noexcept { return size_; }

  friend bool operator==(const DesignSpace& a, const DesignSpace& b) {
    if (a.sites_.size() != b.sites_.size()) return false;
    for (std::size_t i = 0; i < a.sites_.size(); ++i)
      if (a.sites_[i].name != b.sites_[i].name || a.sites_[i].cardinality != b.sites_[i].cardinality)
        return false;
    return true;
  }

 private:
  std::vector<SiteSpec> sites_;
  std::vector<std::size_t> offsets_;
  std::size_t total_bits_ = 0;
  std::uint64_t size_ = 0;
};

using Assignment = std::vector<std::uint64_t>;

struct Decoded {
  /// Raw code per site; may be >= cardinality when infeasible.
  Assignment indices;
  bool feasible = true;
};

namespace detail {

inline void check_length(const DesignSpace& space, const BitVector& x) {
  if (x.size() != space.total_bits())
    throw LengthMismatch("bit vector has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(space.total_bits()));
}

inline std::uint64_t site_code(const DesignSpace& space, const BitVector& x, std::size_t site) {
  const std::size_t off = space.offset(site);
  std::uint64_t code = 0;
  for (std::size_t b = 0; b < space.sites()[site].bits; ++b) code = (code << 1) | x[off + b];
  return code;
}

}  // namespace detail

inline BitVector encode(const DesignSpace& space, std::span<const std::uint64_t> assignment) {
  if (assignment.size() != space.site_count())
    throw LengthMismatch("assignment has " + std::to_string(assignment.size()) + " sites, expected " +
                         std::to_string(space.site_count()));
  BitVector x(space.total_bits());
  for (std::size_t s = 0; s < space.site_count(); ++s) {
    const auto& site = space.sites()[s];
    if (assignment[s] >= site.cardinality)
      throw IndexOutOfRange("category " + std::to_string(assignment[s]) + " out of range for site '" +
                            site.name + "' (cardinality " + std::to_string(site.cardinality) + ")");
    const std::size_t off = space.offset(s);
    for (std::size_t b = 0; b < site.bits; ++b)
      x.set(off + b, (assignment[s] >> (site.bits - 1 - b)) & 1u);
  }
  return x;
}

inline BitVector encode(const DesignSpace& space, std::initializer_list<std::uint64_t> assignment) {
  return encode(space, std::span<const std::uint64_t>(assignment.begin(), assignment.size()));
}

inline Decoded decode(const DesignSpace& space, const BitVector& x) {
  detail::check_length(space, x);
  Decoded out;
  out.indices.reserve(space.site_count());
  for (std::size_t s = 0; s < space.site_count(); ++s) {
    const auto code = detail::site_code(space, x, s);
    if (code >= space.sites()[s].cardinality) out.feasible = false;
    out.indices.push_back(code);
  }
  return out;
}

inline bool is_feasible(const DesignSpace& space, const BitVector& x) {
  detail::check_length(space, x);
  for (std::size_t s = 0; s < space.site_count(); ++s)
    if (detail::site_code(space, x, s) >= space.sites()[s].cardinality) return false;
  return true;
}

/// Pair of bits inside one site whose joint activation only ever produces
/// infeasible codes. Bit indices are global positions in the BitVector.
struct PenaltyPair {
  std::size_t site = 0;
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const PenaltyPair&, const PenaltyPair&) = default;
};

/// Infeasible codes of one site that no penalty pair blocks; these are only
/// removed by post-solve screening.
struct ResidualInfeasible {
  std::size_t site = 0;
  std::vector<std::uint64_t> codes;
};

struct PenaltySpec {
  std::vector<PenaltyPair> pair_terms;
  std::vector<ResidualInfeasible> residual_infeasible;

  bool empty() const noexcept { return pair_terms.empty() && residual_infeasible.empty(); }
};

/// For every site with infeasible codes, emits each within-site bit pair
/// (a, c) such that every code with both bits set is >= k. With MSB-first
/// layout the smallest such code has only those two bits set, so the check
/// is exact without enumerating completions. Infeasible codes not covered
/// by any pair are listed as residual.
inline PenaltySpec build_penalty_spec(const DesignSpace& space) {
  PenaltySpec spec;
  for (std::size_t s = 0; s < space.site_count(); ++s) {
    const auto& site = space.sites()[s];
    if (!site.has_infeasible_codes()) continue;
    const std::size_t off = space.offset(s);
    std::vector<std::uint64_t> blocked;  // code masks of emitted pairs
    for (std::size_t a = 0; a < site.bits; ++a) {
      for (std::size_t c = a + 1; c < site.bits; ++c) {
        const std::uint64_t mask = (std::uint64_t{1} << (site.bits - 1 - a)) |
                                   (std::uint64_t{1} << (site.bits - 1 - c));
        if (mask >= site.cardinality) {
          spec.pair_terms.push_back({s, off + a, off + c});
          blocked.push_back(mask);
        }
      }
    }
    ResidualInfeasible residual{s, {}};
    for (std::uint64_t code = site.cardinality; code < site.code_count(); ++code) {
      bool covered = false;
      for (const auto mask : blocked)
        if ((code & mask) == mask) {
          covered = true;
          break;
        }
      if (!covered) residual.codes.push_back(code);
    }
    if (!residual.codes.empty()) spec.residual_infeasible.push_back(std::move(residual));
  }
  return spec;
}

}  // namespace qbo
