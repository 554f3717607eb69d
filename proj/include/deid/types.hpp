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

#ifndef DEID_TYPES_HPP_
#define DEID_TYPES_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace deid {

inline constexpr int kMaxAge = 115;
inline constexpr int kAgeCount = kMaxAge + 1;
inline constexpr int kMaxHouseholdSize = 12;
inline constexpr int kAdultAge = 18;
inline constexpr int kRaceCount = 7;

enum class Sex : uint8_t { kMale, kFemale };

enum class Race : uint8_t {
  kWhite,
  kBlack,
  kAian,
  kAsian,
  kNhpi,
  kOther,
  kTwoOrMore,
};

std::string_view to_code(Sex sex);
std::string_view to_code(Race race);
// Throw DataError on an unknown code.
Sex sex_from_code(std::string_view code);
Race race_from_code(std::string_view code);

// Tract identifier: state postal code, county number, tract code.
struct GeoId {
  std::string state;
  int county = 0;
  std::string tract;

  auto operator<=>(const GeoId&) const = default;

  bool valid() const;
  // "RI-7-40200"
  std::string str() const;
  static GeoId parse(std::string_view text);
};

struct Person {
  uint8_t age = 0;
  Sex sex = Sex::kMale;
  Race race = Race::kWhite;

  auto operator<=>(const Person&) const = default;
};

// Matching key for swap partners: household size and number of minors.
struct CompositionKey {
  uint16_t size = 0;
  uint16_t under18 = 0;

  auto operator<=>(const CompositionKey&) const = default;
};

struct Household {
  std::string id;
  GeoId geo;
  std::vector<Person> members;

  size_t size() const { return members.size(); }
  int under18() const;
  CompositionKey composition() const;
};

struct AgeHistogram {
  GeoId geo;
  std::array<int64_t, kAgeCount> counts{};

  int64_t total() const {
    return std::accumulate(counts.begin(), counts.end(), int64_t{0});
  }

  bool operator==(const AgeHistogram&) const = default;
};

}  // namespace deid

#endif  // DEID_TYPES_HPP_
