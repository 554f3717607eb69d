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

#ifndef DEID_DATASET_HPP_
#define DEID_DATASET_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deid/types.hpp"

namespace deid {

// Immutable collection of households in canonical order (geography, then
// household id), with lookup indexes for tract and state scoping.
class Dataset {
 public:
  Dataset() = default;

  // Validates and sorts. Throws DataError on empty households, duplicate or
  // empty ids, invalid geographies, or out-of-range ages.
  static Dataset from_households(std::vector<Household> households);

  static Dataset merge(const Dataset& a, const Dataset& b);

  const std::vector<Household>& households() const { return households_; }
  size_t household_count() const { return households_.size(); }
  int64_t person_count() const { return person_count_; }

  std::vector<GeoId> tracts() const;
  bool contains_tract(const GeoId& geo) const;
  // Indexes into households() for one tract; empty for unknown tracts.
  std::span<const uint32_t> tract_households(const GeoId& geo) const;

  const Household* find_household(std::string_view id) const;
  // Throws DataError if the id is unknown.
  uint32_t index_of(std::string_view id) const;

  std::span<const uint32_t> state_households(const std::string& state) const;
  std::span<const uint32_t> state_by_composition(const std::string& state,
                                                 CompositionKey key) const;
  std::span<const uint32_t> state_by_size(const std::string& state,
                                          uint16_t size) const;

  // Rebuilds all indexes from scratch and compares. Throws DataError on any
  // divergence; cheap insurance after bulk edits.
  void validate() const;

 private:
  void build_indexes();

  std::vector<Household> households_;
  int64_t person_count_ = 0;
  std::map<GeoId, std::vector<uint32_t>> by_tract_;
  std::map<std::string, uint32_t, std::less<>> by_id_;
  std::map<std::string, std::vector<uint32_t>> by_state_;
  std::map<std::pair<std::string, CompositionKey>, std::vector<uint32_t>> by_state_comp_;
  std::map<std::pair<std::string, uint16_t>, std::vector<uint32_t>> by_state_size_;
};

// Tract-level age tally. An unknown geography yields the zero histogram so
// callers can diff tracts that lost all households.
AgeHistogram age_histogram(const Dataset& dataset, const GeoId& geo);

}  // namespace deid

#endif  // DEID_DATASET_HPP_
