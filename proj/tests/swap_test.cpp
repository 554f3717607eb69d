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
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "deid/errors.hpp"
#include "deid/metrics.hpp"
#include "deid/microdata_io.hpp"
#include "deid/presets.hpp"
#include "deid/synthesis.hpp"

using namespace deid;

namespace {

Person person(int age, Sex sex = Sex::kMale, Race race = Race::kWhite) {
  return Person{static_cast<uint8_t>(age), sex, race};
}

Household household(std::string id, GeoId geo, std::vector<Person> members) {
  Household h;
  h.id = std::move(id);
  h.geo = std::move(geo);
  h.members = std::move(members);
  return h;
}

const GeoId kTractA{"RI", 7, "100"};
const GeoId kTractB{"RI", 7, "200"};
const GeoId kTractC{"RI", 7, "300"};

std::vector<Household> random_tract(size_t n, uint64_t seed, const GeoId& geo,
                                    std::string prefix) {
  Rng rng(seed);
  std::vector<Household> out;
  for (size_t i = 0; i < n; ++i) {
    Household h;
    h.id = prefix + std::to_string(i);
    h.geo = geo;
    const size_t size = 1 + rng.below(4);
    for (size_t m = 0; m < size; ++m) {
      h.members.push_back(person(static_cast<int>(rng.below(60)),
                                 rng.below(2) == 0 ? Sex::kMale : Sex::kFemale,
                                 static_cast<Race>(rng.below(3))));
    }
    out.push_back(std::move(h));
  }
  return out;
}

// Multiset of member triples, the slow way.
std::multiset<std::vector<int>> member_multiset(const Household& h) {
  std::multiset<std::vector<int>> out;
  for (const Person& p : h.members) {
    out.insert({p.age, static_cast<int>(p.sex), static_cast<int>(p.race)});
  }
  return out;
}

SwapConfig config(double rate, uint64_t seed,
                  FallbackPolicy policy = FallbackPolicy::kRelaxToSize) {
  SwapConfig c;
  c.swap_rate = rate;
  c.seed = seed;
  c.fallback_policy = policy;
  return c;
}

struct TractTally {
  int64_t households = 0;
  int64_t persons = 0;
  int64_t minors = 0;
};

std::map<GeoId, TractTally> tally_tracts(const Dataset& ds) {
  std::map<GeoId, TractTally> out;
  for (const Household& h : ds.households()) {
    TractTally& t = out[h.geo];
    ++t.households;
    t.persons += static_cast<int64_t>(h.size());
    t.minors += h.under18();
  }
  return out;
}

}  // namespace

TEST_CASE("uniqueness key ignores member order") {
  const Household a = household("a", kTractA, {person(5, Sex::kMale, Race::kWhite),
                                               person(30, Sex::kFemale, Race::kWhite)});
  const Household b = household("b", kTractA, {person(30, Sex::kFemale, Race::kWhite),
                                               person(5, Sex::kMale, Race::kWhite)});
  CHECK(uniqueness_key(a) == uniqueness_key(b));
}

TEST_CASE("uniqueness key distinguishes race") {
  const Household a = household("a", kTractA, {person(40, Sex::kMale, Race::kBlack)});
  const Household b = household("b", kTractA, {person(40, Sex::kMale, Race::kWhite)});
  CHECK(uniqueness_key(a) != uniqueness_key(b));
}

TEST_CASE("key equality classes match pairwise multiset comparison") {
  const Dataset ds = Dataset::from_households(random_tract(50, 31, kTractA, "h"));
  const auto& hs = ds.households();
  for (size_t i = 0; i < hs.size(); ++i) {
    for (size_t j = 0; j < hs.size(); ++j) {
      const bool keys_equal = uniqueness_key(hs[i]) == uniqueness_key(hs[j]);
      const bool multisets_equal = member_multiset(hs[i]) == member_multiset(hs[j]);
      CHECK(keys_equal == multisets_equal);
    }
  }
}

TEST_CASE("unique households are the key singletons") {
  SUBCASE("a lone household is unique") {
    const Dataset ds =
        Dataset::from_households({household("only", kTractA, {person(33)})});
    CHECK(find_unique_households(ds, kTractA) == std::vector<std::string>{"only"});
  }
  SUBCASE("an identical pair is not unique") {
    const Dataset ds = Dataset::from_households(
        {household("x", kTractA, {person(33)}), household("y", kTractA, {person(33)})});
    CHECK(find_unique_households(ds, kTractA).empty());
  }
  SUBCASE("matches a frequency-table oracle on a random tract") {
    const Dataset ds = Dataset::from_households(random_tract(30, 77, kTractA, "h"));
    std::map<std::multiset<std::vector<int>>, int> freq;
    for (const Household& h : ds.households()) ++freq[member_multiset(h)];
    std::vector<std::string> expected;
    for (const Household& h : ds.households()) {
      if (freq.at(member_multiset(h)) == 1) expected.push_back(h.id);
    }
    std::sort(expected.begin(), expected.end());
    CHECK(find_unique_households(ds, kTractA) == expected);
  }
}

TEST_CASE("swap set selection prioritizes unique households") {
  // 10 households: 2 unique singles, 4+4 composition-identical pairs.
  std::vector<Household> hs;
  hs.push_back(household("u1", kTractA, {person(91, Sex::kMale, Race::kAsian)}));
  hs.push_back(household("u2", kTractA, {person(92, Sex::kFemale, Race::kNhpi)}));
  for (int i = 0; i < 4; ++i) {
    hs.push_back(household("p" + std::to_string(i), kTractA, {person(30), person(5)}));
    hs.push_back(household("q" + std::to_string(i), kTractA, {person(50, Sex::kFemale)}));
  }
  const Dataset ds = Dataset::from_households(hs);

  SUBCASE("rate zero selects nothing") {
    Rng rng(1);
    CHECK(select_swap_set(ds, kTractA, config(0.0, 0), rng).empty());
  }
  SUBCASE("unique ids always precede the random remainder") {
    std::set<std::string> non_unique_seen;
    for (uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      const auto sel = select_swap_set(ds, kTractA, config(0.3, 0), rng);
      REQUIRE(sel.size() == 3);  // ceil(0.3 * 10)
      const std::set<std::string> first_two{sel[0], sel[1]};
      CHECK(first_two == std::set<std::string>{"u1", "u2"});
      CHECK(sel[2] != "u1");
      CHECK(sel[2] != "u2");
      non_unique_seen.insert(sel[2]);
    }
    CHECK(non_unique_seen.size() > 1);  // the third pick varies with the seed
  }
  SUBCASE("the half-rate bound is attained") {
    std::vector<Household> eight(hs.begin(), hs.begin() + 8);
    const Dataset ds8 = Dataset::from_households(eight);
    Rng rng(5);
    CHECK(select_swap_set(ds8, kTractA, config(0.5, 0), rng).size() == 4);
  }
  SUBCASE("target below unique count takes a strict subset of uniques") {
    std::vector<Household> many;
    for (int i = 0; i < 10; ++i) {
      many.push_back(household("s" + std::to_string(i), kTractA,
                               {person(80 + i, Sex::kMale, static_cast<Race>(i % 7))}));
    }
    const Dataset ds10 = Dataset::from_households(many);
    std::set<std::string> seen;
    for (uint64_t seed = 0; seed < 30; ++seed) {
      Rng rng(seed);
      const auto sel = select_swap_set(ds10, kTractA, config(0.2, 0), rng);
      REQUIRE(sel.size() == 2);
      seen.insert(sel.begin(), sel.end());
    }
    CHECK(seen.size() > 4);  // subset varies across seeds
  }
}

TEST_CASE("selection target rounds up without representation error") {
  // 450 households at rate 0.04: 0.04 * 450 in doubles lands a hair above
  // 18, which naive ceil would round to 19.
  const Dataset ds = Dataset::from_households(random_tract(450, 11, kTractA, "h"));
  Rng rng(1);
  CHECK(select_swap_set(ds, kTractA, config(0.04, 0), rng).size() == 18);
  Rng rng2(1);
  CHECK(select_swap_set(ds, kTractA, config(0.03, 0), rng2).size() == 14);  // ceil(13.5)
}

TEST_CASE("partner search matches composition and relaxes by policy") {
  std::vector<Household> hs;
  // Origin: size 4, two minors.
  hs.push_back(household("origin", kTractA,
                         {person(40), person(38, Sex::kFemale), person(10), person(8)}));
  // Exact match in another tract.
  hs.push_back(household("exact", kTractB,
                         {person(43), person(41, Sex::kFemale), person(12), person(9)}));
  // Size match, different minor count.
  hs.push_back(household("size_only", kTractB,
                         {person(50), person(51), person(52), person(16)}));
  // Different size entirely.
  hs.push_back(household("single", kTractC, {person(70)}));
  // Same tract as origin: never eligible.
  hs.push_back(household("neighbor", kTractA,
                         {person(44), person(42, Sex::kFemale), person(11), person(7)}));
  const Dataset ds = Dataset::from_households(hs);

  SUBCASE("forced choice returns the lone match at level 0") {
    Rng rng(1);
    const PartnerResult r = find_partner(ds, "origin", config(0.1, 0), {}, rng);
    REQUIRE(r.household.has_value());
    CHECK(*r.household == "exact");
    CHECK(r.fallback_level == 0);
  }
  SUBCASE("strict policy returns none when the exact pool is empty") {
    Rng rng(1);
    const PartnerResult r = find_partner(ds, "origin", config(0.1, 0, FallbackPolicy::kStrict),
                                         {"exact"}, rng);
    CHECK_FALSE(r.household.has_value());
  }
  SUBCASE("relax_to_size falls back to the size pool") {
    Rng rng(1);
    const PartnerResult r = find_partner(ds, "origin", config(0.1, 0), {"exact"}, rng);
    REQUIRE(r.household.has_value());
    CHECK(*r.household == "size_only");
    CHECK(r.fallback_level == 1);
  }
  SUBCASE("relax_to_any reaches the whole state") {
    Rng rng(1);
    const PartnerResult r = find_partner(
        ds, "origin", config(0.1, 0, FallbackPolicy::kRelaxToAny), {"exact", "size_only"}, rng);
    REQUIRE(r.household.has_value());
    CHECK(*r.household == "single");
    CHECK(r.fallback_level == 2);
  }
  SUBCASE("relax_to_size stops above the size pool") {
    Rng rng(1);
    const PartnerResult r = find_partner(ds, "origin", config(0.1, 0),
                                         {"exact", "size_only"}, rng);
    CHECK_FALSE(r.household.has_value());
  }
}

TEST_CASE("partner draw is uniform over the eligible pool") {
  // Two tracts; origin in A, 40 eligible exact matches in B.
  std::vector<Household> hs;
  hs.push_back(household("origin", kTractA, {person(30), person(3)}));
  for (int i = 0; i < 40; ++i) {
    hs.push_back(household("cand" + std::to_string(i), kTractB,
                           {person(20 + i), person(static_cast<int>(i % 17))}));
  }
  // Padding in A with a different composition so the pool is exactly the 40.
  for (int i = 0; i < 160; ++i) {
    hs.push_back(household("pad" + std::to_string(i), kTractA, {person(64)}));
  }
  const Dataset ds = Dataset::from_households(hs);

  std::map<std::string, int> freq;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    Rng rng(static_cast<uint64_t>(t) + 1000);
    const PartnerResult r = find_partner(ds, "origin", config(0.1, 0), {}, rng);
    REQUIRE(r.household.has_value());
    CHECK(r.fallback_level == 0);
    ++freq[*r.household];
  }
  CHECK(freq.size() == 40);
  for (const auto& [id, count] : freq) {
    const double p = static_cast<double>(count) / trials;
    CHECK(p > 0.025 - 0.05);  // within 5 percentage points of 1/40
    CHECK(p < 0.025 + 0.05);
  }
}

TEST_CASE("apply_swaps exchanges geography and nothing else") {
  std::vector<Household> hs;
  hs.push_back(household("a", kTractA, {person(5), person(30)}));
  hs.push_back(household("b", kTractB, {person(70)}));
  hs.push_back(household("c", kTractC, {person(40)}));
  const Dataset ds = Dataset::from_households(hs);

  SUBCASE("empty pair list is the identity") {
    const Dataset out = apply_swaps(ds, {});
    CHECK(canonical_csv(out) == canonical_csv(ds));
  }
  SUBCASE("a single pair transposes two tracts") {
    const std::vector<std::pair<std::string, std::string>> pairs{{"a", "b"}};
    const Dataset out = apply_swaps(ds, pairs);
    CHECK(out.find_household("a")->geo == kTractB);
    CHECK(out.find_household("b")->geo == kTractA);
    CHECK(out.find_household("c")->geo == kTractC);
    CHECK(out.tract_households(kTractA).size() == 1);
    CHECK(out.tract_households(kTractB).size() == 1);
    CHECK(member_multiset(*out.find_household("a")) == member_multiset(*ds.find_household("a")));
  }
  SUBCASE("unknown ids are rejected") {
    const std::vector<std::pair<std::string, std::string>> pairs{{"a", "nope"}};
    CHECK_THROWS_AS(apply_swaps(ds, pairs), std::invalid_argument);
  }
  SUBCASE("overlapping pairs are rejected") {
    const std::vector<std::pair<std::string, std::string>> pairs{{"a", "b"}, {"b", "c"}};
    CHECK_THROWS_AS(apply_swaps(ds, pairs), std::invalid_argument);
  }
}

TEST_CASE("zero-rate swap run is the identity") {
  const Dataset ds = Dataset::from_households(random_tract(50, 3, kTractA, "h"));
  const auto [out, report] = swap_dataset(ds, config(0.0, 9));
  CHECK(canonical_csv(out) == canonical_csv(ds));
  CHECK(report.pairs.empty());
  for (const TractSwapCounts& t : report.per_tract) {
    CHECK(t.requested == 0);
    CHECK(t.achieved == 0);
  }
}

TEST_CASE("swap run bookkeeping stays consistent") {
  std::vector<Household> hs = random_tract(120, 5, kTractA, "a");
  auto more = random_tract(90, 6, kTractB, "b");
  hs.insert(hs.end(), more.begin(), more.end());
  more = random_tract(140, 7, kTractC, "c");
  hs.insert(hs.end(), more.begin(), more.end());
  const Dataset ds = Dataset::from_households(hs);

  const auto [out, report] = swap_dataset(ds, config(0.1, 17));

  SUBCASE("requested counts follow the ceiling rule") {
    REQUIRE(report.per_tract.size() == 3);
    CHECK(report.per_tract[0].requested == 12);
    CHECK(report.per_tract[1].requested == 9);
    CHECK(report.per_tract[2].requested == 14);
    for (const TractSwapCounts& t : report.per_tract) {
      CHECK(t.achieved <= t.requested);
    }
  }
  SUBCASE("fallback tallies sum to the pair count") {
    int64_t total = 0;
    for (int64_t c : report.fallback_counts) total += c;
    CHECK(total == static_cast<int64_t>(report.pairs.size()));
  }
  SUBCASE("no household is in two pairs") {
    std::set<std::string> seen;
    for (const SwapPair& p : report.pairs) {
      CHECK(seen.insert(p.household_a).second);
      CHECK(seen.insert(p.household_b).second);
    }
  }
  SUBCASE("geography exchange preserves the member multiset") {
    std::multiset<std::multiset<std::vector<int>>> before;
    std::multiset<std::multiset<std::vector<int>>> after;
    for (const Household& h : ds.households()) before.insert(member_multiset(h));
    for (const Household& h : out.households()) after.insert(member_multiset(h));
    CHECK(before == after);
  }
  SUBCASE("runs are deterministic") {
    const auto [out2, report2] = swap_dataset(ds, config(0.1, 17));
    CHECK(canonical_csv(out2) == canonical_csv(out));
    CHECK(report2.pairs == report.pairs);
  }
}

TEST_CASE("strict matching preserves tract size and minor counts exactly") {
  std::vector<Household> hs = random_tract(200, 21, kTractA, "a");
  auto more = random_tract(200, 22, kTractB, "b");
  hs.insert(hs.end(), more.begin(), more.end());
  const Dataset ds = Dataset::from_households(hs);
  const auto before = tally_tracts(ds);

  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto [out, report] = swap_dataset(ds, config(0.25, seed, FallbackPolicy::kStrict));
    for (const SwapPair& p : report.pairs) {
      CHECK(p.fallback_level == 0);
      CHECK(ds.find_household(p.household_a)->composition() ==
            ds.find_household(p.household_b)->composition());
    }
    const auto after = tally_tracts(out);
    REQUIRE(after.size() == before.size());
    for (const auto& [geo, tally] : before) {
      CHECK(after.at(geo).households == tally.households);
      CHECK(after.at(geo).persons == tally.persons);
      CHECK(after.at(geo).minors == tally.minors);
    }
  }
}

TEST_CASE("single-year ages move even though totals do not") {
  // Spec'd property: at rate 0.5 the under-18 age profile changes with high
  // probability even under composition matching.
  TractSpec spec;
  spec.geo = kTractA;
  spec.target_population = 4000;
  spec.household_size_dist = {0.2, 0.3, 0.2, 0.2, 0.1};
  spec.age_pyramid = std::vector<double>(80, 1.0);
  spec.sex_ratio = 0.5;
  spec.race_dist = {0.7, 0.1, 0.05, 0.05, 0.02, 0.05, 0.03};
  Dataset a = synthesize_tract(spec, 41);
  spec.geo = kTractB;
  Dataset b = synthesize_tract(spec, 43);
  const Dataset ds = Dataset::merge(a, b);

  const AgeHistogram before = age_histogram(ds, kTractA);
  const auto [out, report] = swap_dataset(ds, config(0.5, 4));
  const AgeHistogram after = age_histogram(out, kTractA);
  const MapeResult m = mape(before, after, range_under18());
  REQUIRE(m.value.has_value());
  CHECK(*m.value > 0.0);
}

TEST_CASE("swapped_histogram matches a full apply") {
  std::vector<Household> hs = random_tract(150, 51, kTractA, "a");
  auto more = random_tract(130, 52, kTractB, "b");
  hs.insert(hs.end(), more.begin(), more.end());
  more = random_tract(90, 53, kTractC, "c");
  hs.insert(hs.end(), more.begin(), more.end());
  const Dataset ds = Dataset::from_households(hs);

  for (const double rate : {0.04, 0.25, 0.5}) {
    const SwapReport report = plan_swaps(ds, config(rate, 77));
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const SwapPair& p : report.pairs) pairs.emplace_back(p.household_a, p.household_b);
    const Dataset applied = apply_swaps(ds, pairs);
    for (const GeoId& geo : ds.tracts()) {
      CHECK(swapped_histogram(ds, report, geo) == age_histogram(applied, geo));
    }
  }
}

TEST_CASE("swap config and policy names validate") {
  CHECK_THROWS_AS(config(-0.01, 0).validate(), ConfigError);
  CHECK_THROWS_AS(config(0.51, 0).validate(), ConfigError);
  CHECK_NOTHROW(config(0.5, 0).validate());
  CHECK(fallback_policy_from_string("strict") == FallbackPolicy::kStrict);
  CHECK(fallback_policy_from_string("relax_to_size") == FallbackPolicy::kRelaxToSize);
  CHECK(fallback_policy_from_string("relax_to_any") == FallbackPolicy::kRelaxToAny);
  CHECK_THROWS_AS(fallback_policy_from_string("lenient"), ConfigError);
  CHECK(to_string(FallbackPolicy::kStrict) == "strict");
}

TEST_CASE("swap report serializes to json") {
  std::vector<Household> hs = random_tract(40, 61, kTractA, "a");
  auto more = random_tract(40, 62, kTractB, "b");
  hs.insert(hs.end(), more.begin(), more.end());
  const Dataset ds = Dataset::from_households(hs);
  const SwapReport report = plan_swaps(ds, config(0.1, 3));
  const std::string json = swap_report_to_json(report);
  CHECK(json.find("\"pairs\"") != std::string::npos);
  CHECK(json.find("\"per_tract\"") != std::string::npos);
  CHECK(json.find("\"fallback_counts\"") != std::string::npos);
  CHECK(json.find("RI-7-100") != std::string::npos);
}
