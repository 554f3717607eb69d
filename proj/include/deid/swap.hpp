// Copyright 2026 The deidbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DEID_SWAP_HPP_
#define DEID_SWAP_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deid/dataset.hpp"
#include "deid/rng.hpp"
#include "deid/types.hpp"

namespace deid {

// How far partner matching may relax when no household in the state shares
// the initiator's composition.
enum class FallbackPolicy {
  kStrict,       // exact (size, under-18) match or no pair
  kRelaxToSize,  // then size-only match
  kRelaxToAny,   // then any household in the state
};

std::string_view to_string(FallbackPolicy policy);
// Throws ConfigError on an unknown name.
FallbackPolicy fallback_policy_from_string(std::string_view name);

// Levels a partner search can report: 0 exact composition, 1 size only,
// 2 unconstrained.
inline constexpr int kFallbackLevels = 3;

struct SwapConfig {
  double swap_rate = 0.0;
  uint64_t seed = 0;
  FallbackPolicy fallback_policy = FallbackPolicy::kRelaxToSize;

  // Throws ConfigError unless 0 <= swap_rate <= 0.5.
  void validate() const;
};

struct SwapPair {
  std::string household_a;  // initiator
  std::string household_b;  // partner
  int fallback_level = 0;

  bool operator==(const SwapPair&) const = default;
};

struct TractSwapCounts {
  GeoId geo;
  int64_t requested = 0;  // ceil(rate * tract household count)
  int64_t achieved = 0;   // pairs actually formed

  bool operator==(const TractSwapCounts&) const = default;
};

struct SwapReport {
  std::vector<SwapPair> pairs;
  std::vector<TractSwapCounts> per_tract;  // sorted by geo
  std::array<int64_t, kFallbackLevels> fallback_counts{};
};

std::string swap_report_to_json(const SwapReport& report);

// Sorted multiset of member (age, sex, race) triples, each packed into one
// integer. Member order inside the household does not matter.
using UniquenessKey = std::vector<uint32_t>;
UniquenessKey uniqueness_key(const Household& household);

// Ids of households whose uniqueness key occurs exactly once in the tract,
// sorted.
std::vector<std::string> find_unique_households(const Dataset& dataset, const GeoId& geo);

// Draws ceil(swap_rate * n) household ids from the tract: every unique
// household before any non-unique one, uniform order within each class.
std::vector<std::string> select_swap_set(const Dataset& dataset, const GeoId& geo,
                                         const SwapConfig& config, Rng& rng);

struct PartnerResult {
  std::optional<std::string> household;
  int fallback_level = 0;
};

// Uniform draw from the same-state, different-tract pool matching origin's
// composition, relaxing per the policy only when a pool is empty.
PartnerResult find_partner(const Dataset& dataset, std::string_view origin_id,
                           const SwapConfig& config,
                           const std::set<std::string>& already_used, Rng& rng);

// Exchanges the geographies of each pair. Throws std::invalid_argument on
// an unknown id or an id appearing twice.
Dataset apply_swaps(const Dataset& dataset,
                    std::span<const std::pair<std::string, std::string>> pairs);

// Selection and matching for every tract against the input dataset; the
// exchanges are applied once at the end. Tracts are processed in sorted
// order, each from its own seed-derived substream, with one shared
// used-household set.
SwapReport plan_swaps(const Dataset& dataset, const SwapConfig& config);
std::pair<Dataset, SwapReport> swap_dataset(const Dataset& dataset,
                                            const SwapConfig& config);

// Histogram of `geo` after applying the report's pairs, computed from the
// pre-swap dataset by adjusting only for households that enter or leave the
// tract. Equals age_histogram over the swapped dataset.
AgeHistogram swapped_histogram(const Dataset& dataset, const SwapReport& report,
                               const GeoId& geo);

}  // namespace deid

#endif  // DEID_SWAP_HPP_
