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

#include "deid/swap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "deid/errors.hpp"

namespace deid {

namespace {

// ceil(rate * n) with a guard against representation error pushing an exact
// product just above an integer (0.04 * 450 evaluates to 18.000...004).
size_t swap_target(double rate, size_t n) {
  const double raw = rate * static_cast<double>(n);
  return static_cast<size_t>(std::ceil(raw - 1e-9));
}

int max_fallback_level(FallbackPolicy policy) {
  switch (policy) {
    case FallbackPolicy::kStrict: return 0;
    case FallbackPolicy::kRelaxToSize: return 1;
    case FallbackPolicy::kRelaxToAny: return 2;
  }
  throw ConfigError("invalid fallback policy value");
}

// Selection with an optional exclusion mask (indexed like ds.households()).
// Unique households fill the quota first; order within each class is a
// uniform shuffle.
std::vector<std::string> select_swap_set_masked(const Dataset& ds, const GeoId& geo,
                                                const SwapConfig& config, Rng& rng,
                                                const std::vector<char>* used) {
  const auto tract = ds.tract_households(geo);
  const size_t target = swap_target(config.swap_rate, tract.size());
  if (target == 0) return {};

  std::map<UniquenessKey, int> key_counts;
  std::vector<UniquenessKey> keys;
  keys.reserve(tract.size());
  for (uint32_t i : tract) {
    keys.push_back(uniqueness_key(ds.households()[i]));
    ++key_counts[keys.back()];
  }

  // tract spans are in canonical id order, so both classes start sorted.
  std::vector<std::string> unique_class;
  std::vector<std::string> other_class;
  for (size_t k = 0; k < tract.size(); ++k) {
    const uint32_t i = tract[k];
    if (used != nullptr && (*used)[i]) continue;
    const std::string& id = ds.households()[i].id;
    (key_counts.at(keys[k]) == 1 ? unique_class : other_class).push_back(id);
  }
  rng.shuffle(unique_class);
  rng.shuffle(other_class);

  std::vector<std::string> out;
  out.reserve(target);
  for (const std::string& id : unique_class) {
    if (out.size() == target) return out;
    out.push_back(id);
  }
  for (const std::string& id : other_class) {
    if (out.size() == target) return out;
    out.push_back(id);
  }
  return out;
}

PartnerResult find_partner_masked(const Dataset& ds, uint32_t origin_idx,
                                  const SwapConfig& config,
                                  const std::vector<char>& used, Rng& rng) {
  const Household& origin = ds.households()[origin_idx];
  const int max_level = max_fallback_level(config.fallback_policy);
  std::vector<uint32_t> candidates;
  for (int level = 0; level <= max_level; ++level) {
    std::span<const uint32_t> pool;
    switch (level) {
      case 0: pool = ds.state_by_composition(origin.geo.state, origin.composition()); break;
      case 1: pool = ds.state_by_size(origin.geo.state, static_cast<uint16_t>(origin.size())); break;
      default: pool = ds.state_households(origin.geo.state); break;
    }
    candidates.clear();
    candidates.reserve(pool.size());
    for (uint32_t i : pool) {
      if (i == origin_idx || used[i]) continue;
      if (ds.households()[i].geo == origin.geo) continue;
      candidates.push_back(i);
    }
    if (candidates.empty()) continue;
    const uint32_t pick = candidates[rng.below(candidates.size())];
    return {ds.households()[pick].id, level};
  }
  return {std::nullopt, max_level};
}

std::vector<char> mask_from_ids(const Dataset& ds, const std::set<std::string>& ids) {
  std::vector<char> used(ds.household_count(), 0);
  for (const std::string& id : ids) {
    const Household* h = ds.find_household(id);
    if (h == nullptr) continue;  // absent ids cannot appear in any pool
    used[static_cast<size_t>(h - ds.households().data())] = 1;
  }
  return used;
}

}  // namespace

std::string_view to_string(FallbackPolicy policy) {
  switch (policy) {
    case FallbackPolicy::kStrict: return "strict";
    case FallbackPolicy::kRelaxToSize: return "relax_to_size";
    case FallbackPolicy::kRelaxToAny: return "relax_to_any";
  }
  throw ConfigError("invalid fallback policy value");
}

FallbackPolicy fallback_policy_from_string(std::string_view name) {
  if (name == "strict") return FallbackPolicy::kStrict;
  if (name == "relax_to_size") return FallbackPolicy::kRelaxToSize;
  if (name == "relax_to_any") return FallbackPolicy::kRelaxToAny;
  throw ConfigError("unknown fallback policy '" + std::string(name) + "'");
}

void SwapConfig::validate() const {
  if (!std::isfinite(swap_rate) || swap_rate < 0.0 || swap_rate > 0.5) {
    throw ConfigError("swap_rate must lie in [0, 0.5]");
  }
}

UniquenessKey uniqueness_key(const Household& household) {
  UniquenessKey key;
  key.reserve(household.members.size());
  for (const Person& p : household.members) {
    key.push_back((static_cast<uint32_t>(p.age) << 16) |
                  (static_cast<uint32_t>(p.sex) << 8) |
                  static_cast<uint32_t>(p.race));
  }
  std::sort(key.begin(), key.end());
  return key;
}

std::vector<std::string> find_unique_households(const Dataset& dataset, const GeoId& geo) {
  const auto tract = dataset.tract_households(geo);
  std::map<UniquenessKey, int> key_counts;
  std::vector<UniquenessKey> keys;
  keys.reserve(tract.size());
  for (uint32_t i : tract) {
    keys.push_back(uniqueness_key(dataset.households()[i]));
    ++key_counts[keys.back()];
  }
  std::vector<std::string> out;
  for (size_t k = 0; k < tract.size(); ++k) {
    if (key_counts.at(keys[k]) == 1) out.push_back(dataset.households()[tract[k]].id);
  }
  return out;
}

std::vector<std::string> select_swap_set(const Dataset& dataset, const GeoId& geo,
                                         const SwapConfig& config, Rng& rng) {
  config.validate();
  return select_swap_set_masked(dataset, geo, config, rng, nullptr);
}

PartnerResult find_partner(const Dataset& dataset, std::string_view origin_id,
                           const SwapConfig& config,
                           const std::set<std::string>& already_used, Rng& rng) {
  config.validate();
  return find_partner_masked(dataset, dataset.index_of(origin_id), config,
                             mask_from_ids(dataset, already_used), rng);
}

Dataset apply_swaps(const Dataset& dataset,
                    std::span<const std::pair<std::string, std::string>> pairs) {
  std::vector<Household> households = dataset.households();
  std::set<std::string_view> seen;
  for (const auto& [a, b] : pairs) {
    const Household* ha = dataset.find_household(a);
    const Household* hb = dataset.find_household(b);
    if (ha == nullptr || hb == nullptr) {
      throw std::invalid_argument("swap pair references unknown household id");
    }
    if (!seen.insert(a).second || !seen.insert(b).second) {
      throw std::invalid_argument("household id appears in more than one swap pair");
    }
    const size_t ia = static_cast<size_t>(ha - dataset.households().data());
    const size_t ib = static_cast<size_t>(hb - dataset.households().data());
    std::swap(households[ia].geo, households[ib].geo);
  }
  return Dataset::from_households(std::move(households));
}

SwapReport plan_swaps(const Dataset& dataset, const SwapConfig& config) {
  config.validate();
  SwapReport report;
  std::vector<char> used(dataset.household_count(), 0);
  for (const GeoId& geo : dataset.tracts()) {
    Rng rng(derive_seed(config.seed, "swap-tract", geo.str()));
    TractSwapCounts counts;
    counts.geo = geo;
    counts.requested = static_cast<int64_t>(
        swap_target(config.swap_rate, dataset.tract_households(geo).size()));
    const auto selection = select_swap_set_masked(dataset, geo, config, rng, &used);
    for (const std::string& id : selection) {
      const uint32_t origin_idx = dataset.index_of(id);
      const PartnerResult partner = find_partner_masked(dataset, origin_idx, config, used, rng);
      if (!partner.household.has_value()) continue;
      const uint32_t partner_idx = dataset.index_of(*partner.household);
      used[origin_idx] = 1;
      used[partner_idx] = 1;
      report.pairs.push_back({id, *partner.household, partner.fallback_level});
      ++report.fallback_counts[static_cast<size_t>(partner.fallback_level)];
      ++counts.achieved;
    }
    report.per_tract.push_back(counts);
  }
  return report;
}

std::pair<Dataset, SwapReport> swap_dataset(const Dataset& dataset,
                                            const SwapConfig& config) {
  SwapReport report = plan_swaps(dataset, config);
  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(report.pairs.size());
  for (const SwapPair& p : report.pairs) pairs.emplace_back(p.household_a, p.household_b);
  return {apply_swaps(dataset, pairs), std::move(report)};
}

AgeHistogram swapped_histogram(const Dataset& dataset, const SwapReport& report,
                               const GeoId& geo) {
  AgeHistogram hist = age_histogram(dataset, geo);
  for (const SwapPair& pair : report.pairs) {
    const Household& a = dataset.households()[dataset.index_of(pair.household_a)];
    const Household& b = dataset.households()[dataset.index_of(pair.household_b)];
    const bool a_in = a.geo == geo;
    const bool b_in = b.geo == geo;
    if (a_in == b_in) continue;  // both outside, or an in-tract no-op
    const Household& leaving = a_in ? a : b;
    const Household& entering = a_in ? b : a;
    for (const Person& p : leaving.members) --hist.counts[p.age];
    for (const Person& p : entering.members) ++hist.counts[p.age];
  }
  return hist;
}

std::string swap_report_to_json(const SwapReport& report) {
  nlohmann::json j;
  j["pairs"] = nlohmann::json::array();
  for (const SwapPair& p : report.pairs) {
    j["pairs"].push_back({{"initiator", p.household_a},
                          {"partner", p.household_b},
                          {"fallback_level", p.fallback_level}});
  }
  j["per_tract"] = nlohmann::json::array();
  for (const TractSwapCounts& t : report.per_tract) {
    j["per_tract"].push_back({{"tract", t.geo.str()},
                              {"requested", t.requested},
                              {"achieved", t.achieved}});
  }
  j["fallback_counts"] = report.fallback_counts;
  return j.dump(2) + "\n";
}

}  // namespace deid
