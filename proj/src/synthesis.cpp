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

#include "deid/synthesis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deid/errors.hpp"
#include "deid/rng.hpp"

namespace deid {

namespace {

void check_weights(const std::vector<double>& w, size_t max_len, const char* what) {
  if (w.empty()) throw ConfigError(std::string(what) + " is empty");
  if (w.size() > max_len) {
    throw ConfigError(std::string(what) + " has " + std::to_string(w.size()) +
                      " entries, at most " + std::to_string(max_len) + " allowed");
  }
  double total = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError(std::string(what) + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (total <= 0.0) throw ConfigError(std::string(what) + " has no positive mass");
}

}  // namespace

void TractSpec::validate() const {
  if (!geo.valid()) throw ConfigError("invalid geography '" + geo.str() + "'");
  if (target_population <= 0) throw ConfigError("target_population must be positive");
  check_weights(household_size_dist, kMaxHouseholdSize, "household_size_dist");
  check_weights(age_pyramid, kAgeCount, "age_pyramid");
  check_weights(race_dist, kRaceCount, "race_dist");
  if (!std::isfinite(sex_ratio) || sex_ratio < 0.0 || sex_ratio > 1.0) {
    throw ConfigError("sex_ratio must be in [0, 1]");
  }
}

Dataset synthesize_tract(const TractSpec& spec, uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const CategoricalSampler size_sampler(spec.household_size_dist);
  const CategoricalSampler age_sampler(spec.age_pyramid);
  const CategoricalSampler race_sampler(spec.race_dist);

  std::vector<Household> households;
  int64_t population = 0;
  size_t serial = 0;
  while (population < spec.target_population) {
    Household h;
    ++serial;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "h%06zu", serial);
    h.id = spec.geo.state + "-" + std::to_string(spec.geo.county) + "-" + spec.geo.tract +
           "-" + idbuf;
    h.geo = spec.geo;
    const int size = size_sampler.sample(rng) + 1;
    h.members.reserve(static_cast<size_t>(size));
    for (int m = 0; m < size; ++m) {
      Person p;
      p.age = static_cast<uint8_t>(age_sampler.sample(rng));
      p.sex = rng.uniform01() < spec.sex_ratio ? Sex::kMale : Sex::kFemale;
      p.race = static_cast<Race>(race_sampler.sample(rng));
      h.members.push_back(p);
    }
    population += size;
    households.push_back(std::move(h));
  }
  return Dataset::from_households(std::move(households));
}

namespace {

using nlohmann::json;

std::vector<double> weights_from_json(const json& j, const std::string& key,
                                      const std::string& origin) {
  if (!j.contains(key)) throw ConfigError(origin + ": missing '" + key + "'");
  const json& arr = j.at(key);
  if (!arr.is_array()) throw ConfigError(origin + ": '" + key + "' must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_number()) throw ConfigError(origin + ": '" + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

TractSpec parse_tract_spec_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": expected a JSON object");
  TractSpec spec;
  try {
    if (!j.contains("geo") || !j.at("geo").is_string()) {
      throw ConfigError(origin + ": missing string 'geo'");
    }
    spec.geo = GeoId::parse(j.at("geo").get<std::string>());
    if (!j.contains("target_population") || !j.at("target_population").is_number_integer()) {
      throw ConfigError(origin + ": missing integer 'target_population'");
    }
    spec.target_population = j.at("target_population").get<int64_t>();
    spec.household_size_dist = weights_from_json(j, "household_size_dist", origin);
    spec.age_pyramid = weights_from_json(j, "age_pyramid", origin);
    if (!j.contains("sex_ratio") || !j.at("sex_ratio").is_number()) {
      throw ConfigError(origin + ": missing number 'sex_ratio'");
    }
    spec.sex_ratio = j.at("sex_ratio").get<double>();
    spec.race_dist = weights_from_json(j, "race_dist", origin);
  } catch (const DataError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  spec.validate();
  return spec;
}

TractSpec load_tract_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tract_spec_json(buf.str(), path);
}

std::string tract_spec_to_json(const TractSpec& spec) {
  json j;
  j["geo"] = spec.geo.str();
  j["target_population"] = spec.target_population;
  j["household_size_dist"] = spec.household_size_dist;
  j["age_pyramid"] = spec.age_pyramid;
  j["sex_ratio"] = spec.sex_ratio;
  j["race_dist"] = spec.race_dist;
  return j.dump(2) + "\n";
}

}  // namespace deid
