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

#include "deid/types.hpp"

#include <cctype>
#include <charconv>

#include "deid/errors.hpp"

namespace deid {

std::string_view to_code(Sex sex) {
  return sex == Sex::kMale ? "M" : "F";
}

std::string_view to_code(Race race) {
  switch (race) {
    case Race::kWhite: return "WH";
    case Race::kBlack: return "BL";
    case Race::kAian: return "AI";
    case Race::kAsian: return "AS";
    case Race::kNhpi: return "PI";
    case Race::kOther: return "OT";
    case Race::kTwoOrMore: return "TM";
  }
  throw DataError("invalid race value");
}

Sex sex_from_code(std::string_view code) {
  if (code == "M") return Sex::kMale;
  if (code == "F") return Sex::kFemale;
  throw DataError("unknown sex code '" + std::string(code) + "'");
}

Race race_from_code(std::string_view code) {
  if (code == "WH") return Race::kWhite;
  if (code == "BL") return Race::kBlack;
  if (code == "AI") return Race::kAian;
  if (code == "AS") return Race::kAsian;
  if (code == "PI") return Race::kNhpi;
  if (code == "OT") return Race::kOther;
  if (code == "TM") return Race::kTwoOrMore;
  throw DataError("unknown race code '" + std::string(code) + "'");
}

bool GeoId::valid() const {
  if (state.size() != 2) return false;
  for (char c : state) {
    if (!std::isupper(static_cast<unsigned char>(c))) return false;
  }
  return county >= 0 && !tract.empty();
}

std::string GeoId::str() const {
  return state + "-" + std::to_string(county) + "-" + tract;
}

GeoId GeoId::parse(std::string_view text) {
  const size_t first = text.find('-');
  if (first == std::string_view::npos) {
    throw DataError("malformed geography '" + std::string(text) + "'");
  }
  const size_t second = text.find('-', first + 1);
  if (second == std::string_view::npos) {
    throw DataError("malformed geography '" + std::string(text) + "'");
  }
  GeoId geo;
  geo.state = std::string(text.substr(0, first));
  const std::string_view county_str = text.substr(first + 1, second - first - 1);
  auto [ptr, ec] = std::from_chars(county_str.data(), county_str.data() + county_str.size(),
                                   geo.county);
  if (ec != std::errc{} || ptr != county_str.data() + county_str.size()) {
    throw DataError("malformed county in geography '" + std::string(text) + "'");
  }
  geo.tract = std::string(text.substr(second + 1));
  if (!geo.valid()) {
    throw DataError("malformed geography '" + std::string(text) + "'");
  }
  return geo;
}

int Household::under18() const {
  int n = 0;
  for (const Person& p : members) {
    if (p.age < kAdultAge) ++n;
  }
  return n;
}

CompositionKey Household::composition() const {
  return CompositionKey{static_cast<uint16_t>(members.size()),
                        static_cast<uint16_t>(under18())};
}

}  // namespace deid
