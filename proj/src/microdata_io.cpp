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

#include "deid/microdata_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "deid/errors.hpp"
#include "deid/strings.hpp"

namespace deid {

namespace {

std::string where(std::string_view origin, size_t line) {
  return std::string(origin) + ":" + std::to_string(line);
}

int parse_int(std::string_view field, std::string_view what,
              std::string_view origin, size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError(where(origin, line) + ": malformed " + std::string(what) + " '" +
                    std::string(field) + "'");
  }
  return value;
}

}  // namespace

Dataset parse_microdata_csv(std::string_view text, std::string_view origin) {
  size_t pos = 0;
  size_t line_no = 0;

  auto next_line = [&](std::string_view& out) {
    if (pos >= text.size()) return false;
    const size_t nl = text.find('\n', pos);
    out = nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    ++line_no;
    return true;
  };

  std::string_view header;
  if (!next_line(header) || header != kMicrodataHeader) {
    throw DataError(where(origin, 1) + ": expected header '" +
                    std::string(kMicrodataHeader) + "'");
  }

  // Member rows may arrive in any order; person_id fixes the order inside a
  // household.
  struct PendingHousehold {
    GeoId geo;
    size_t first_line = 0;
    std::map<int, Person> members;
  };
  std::map<std::string, PendingHousehold> pending;
  std::vector<std::string> id_order;

  std::string_view line;
  while (next_line(line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 8) {
      throw DataError(where(origin, line_no) + ": expected 8 fields, got " +
                      std::to_string(fields.size()));
    }
    GeoId geo;
    geo.state = std::string(fields[0]);
    geo.county = parse_int(fields[1], "county", origin, line_no);
    geo.tract = std::string(fields[2]);
    if (!geo.valid()) {
      throw DataError(where(origin, line_no) + ": invalid geography '" + geo.str() + "'");
    }
    const std::string household_id(fields[3]);
    if (household_id.empty()) {
      throw DataError(where(origin, line_no) + ": empty household_id");
    }
    const int person_id = parse_int(fields[4], "person_id", origin, line_no);
    const int age = parse_int(fields[5], "age", origin, line_no);
    if (age < 0 || age > kMaxAge) {
      throw DataError(where(origin, line_no) + ": age " + std::to_string(age) +
                      " out of range [0, " + std::to_string(kMaxAge) + "]");
    }
    Person person;
    person.age = static_cast<uint8_t>(age);
    try {
      person.sex = sex_from_code(fields[6]);
      person.race = race_from_code(fields[7]);
    } catch (const DataError& e) {
      throw DataError(where(origin, line_no) + ": " + e.what());
    }

    auto [it, inserted] = pending.try_emplace(household_id);
    PendingHousehold& hh = it->second;
    if (inserted) {
      hh.geo = geo;
      hh.first_line = line_no;
      id_order.push_back(household_id);
    } else if (hh.geo != geo) {
      throw DataError(where(origin, line_no) + ": household '" + household_id +
                      "' spans geographies '" + hh.geo.str() + "' and '" + geo.str() + "'");
    }
    if (!hh.members.emplace(person_id, person).second) {
      throw DataError(where(origin, line_no) + ": duplicate person_id " +
                      std::to_string(person_id) + " in household '" + household_id + "'");
    }
  }

  // A header-only file is the empty dataset; round-trips with save.
  std::vector<Household> households;
  households.reserve(id_order.size());
  for (const std::string& id : id_order) {
    PendingHousehold& hh = pending.at(id);
    Household out;
    out.id = id;
    out.geo = hh.geo;
    out.members.reserve(hh.members.size());
    for (const auto& [pid, person] : hh.members) out.members.push_back(person);
    households.push_back(std::move(out));
  }
  return Dataset::from_households(std::move(households));
}

Dataset load_microdata(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_microdata_csv(buf.str(), path);
}

std::string canonical_csv(const Dataset& dataset) {
  std::string out;
  out.reserve(64 * static_cast<size_t>(dataset.person_count()) + 64);
  out += kMicrodataHeader;
  out += '\n';
  for (const Household& h : dataset.households()) {
    for (size_t i = 0; i < h.members.size(); ++i) {
      const Person& p = h.members[i];
      out += h.geo.state;
      out += ',';
      out += std::to_string(h.geo.county);
      out += ',';
      out += h.geo.tract;
      out += ',';
      out += h.id;
      out += ',';
      out += std::to_string(i + 1);
      out += ',';
      out += std::to_string(static_cast<int>(p.age));
      out += ',';
      out += to_code(p.sex);
      out += ',';
      out += to_code(p.race);
      out += '\n';
    }
  }
  return out;
}

void save_microdata(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << canonical_csv(dataset);
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace deid
