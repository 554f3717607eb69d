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

#include "deid/dataset.hpp"

#include <algorithm>

#include "deid/errors.hpp"

namespace deid {

namespace {

bool canonical_less(const Household& a, const Household& b) {
  if (a.geo != b.geo) return a.geo < b.geo;
  return a.id < b.id;
}

}  // namespace

Dataset Dataset::from_households(std::vector<Household> households) {
  for (const Household& h : households) {
    if (h.id.empty()) throw DataError("household with empty id");
    if (h.members.empty()) throw DataError("household '" + h.id + "' has no members");
    if (!h.geo.valid()) {
      throw DataError("household '" + h.id + "' has invalid geography '" + h.geo.str() + "'");
    }
    for (const Person& p : h.members) {
      if (p.age > kMaxAge) {
        throw DataError("household '" + h.id + "' has member age out of range");
      }
    }
  }
  std::sort(households.begin(), households.end(), canonical_less);
  for (size_t i = 1; i < households.size(); ++i) {
    if (households[i].id == households[i - 1].id) {
      throw DataError("duplicate household id '" + households[i].id + "'");
    }
  }
  Dataset ds;
  ds.households_ = std::move(households);
  ds.build_indexes();
  return ds;
}

Dataset Dataset::merge(const Dataset& a, const Dataset& b) {
  std::vector<Household> all = a.households_;
  all.insert(all.end(), b.households_.begin(), b.households_.end());
  return from_households(std::move(all));
}

void Dataset::build_indexes() {
  person_count_ = 0;
  by_tract_.clear();
  by_id_.clear();
  by_state_.clear();
  by_state_comp_.clear();
  by_state_size_.clear();
  for (uint32_t i = 0; i < households_.size(); ++i) {
    const Household& h = households_[i];
    person_count_ += static_cast<int64_t>(h.members.size());
    by_tract_[h.geo].push_back(i);
    auto [it, inserted] = by_id_.emplace(h.id, i);
    if (!inserted) throw DataError("duplicate household id '" + h.id + "'");
    by_state_[h.geo.state].push_back(i);
    by_state_comp_[{h.geo.state, h.composition()}].push_back(i);
    by_state_size_[{h.geo.state, static_cast<uint16_t>(h.size())}].push_back(i);
  }
}

std::vector<GeoId> Dataset::tracts() const {
  std::vector<GeoId> out;
  out.reserve(by_tract_.size());
  for (const auto& [geo, idx] : by_tract_) out.push_back(geo);
  return out;
}

bool Dataset::contains_tract(const GeoId& geo) const {
  return by_tract_.find(geo) != by_tract_.end();
}

std::span<const uint32_t> Dataset::tract_households(const GeoId& geo) const {
  auto it = by_tract_.find(geo);
  if (it == by_tract_.end()) return {};
  return it->second;
}

const Household* Dataset::find_household(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return nullptr;
  return &households_[it->second];
}

uint32_t Dataset::index_of(std::string_view id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw DataError("unknown household id '" + std::string(id) + "'");
  }
  return it->second;
}

std::span<const uint32_t> Dataset::state_households(const std::string& state) const {
  auto it = by_state_.find(state);
  if (it == by_state_.end()) return {};
  return it->second;
}

std::span<const uint32_t> Dataset::state_by_composition(const std::string& state,
                                                        CompositionKey key) const {
  auto it = by_state_comp_.find({state, key});
  if (it == by_state_comp_.end()) return {};
  return it->second;
}

std::span<const uint32_t> Dataset::state_by_size(const std::string& state,
                                                 uint16_t size) const {
  auto it = by_state_size_.find({state, size});
  if (it == by_state_size_.end()) return {};
  return it->second;
}

void Dataset::validate() const {
  for (size_t i = 1; i < households_.size(); ++i) {
    if (!canonical_less(households_[i - 1], households_[i])) {
      throw DataError("dataset order invariant violated at index " + std::to_string(i));
    }
  }
  Dataset rebuilt;
  rebuilt.households_ = households_;
  rebuilt.build_indexes();
  if (rebuilt.person_count_ != person_count_ || rebuilt.by_tract_ != by_tract_ ||
      rebuilt.by_id_ != by_id_ || rebuilt.by_state_ != by_state_ ||
      rebuilt.by_state_comp_ != by_state_comp_ ||
      rebuilt.by_state_size_ != by_state_size_) {
    throw DataError("dataset indexes are stale");
  }
}

AgeHistogram age_histogram(const Dataset& dataset, const GeoId& geo) {
  AgeHistogram hist;
  hist.geo = geo;
  for (uint32_t i : dataset.tract_households(geo)) {
    for (const Person& p : dataset.households()[i].members) {
      ++hist.counts[p.age];
    }
  }
  return hist;
}

}  // namespace deid
