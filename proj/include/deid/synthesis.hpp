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

#ifndef DEID_SYNTHESIS_HPP_
#define DEID_SYNTHESIS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "deid/dataset.hpp"
#include "deid/types.hpp"

namespace deid {

// Marginal distributions for one synthetic tract. Weight vectors may be
// shorter than their domain; missing tail entries count as zero.
struct TractSpec {
  GeoId geo;
  int64_t target_population = 0;
  // Index d is the weight of household size d+1; at most 12 entries.
  std::vector<double> household_size_dist;
  // Index a is the weight of age a; at most 116 entries.
  std::vector<double> age_pyramid;
  // Probability a sampled person is male.
  double sex_ratio = 0.5;
  // Weight per race, enum order; at most 7 entries.
  std::vector<double> race_dist;

  // Throws ConfigError on violations.
  void validate() const;
};

// Draws households until the first one that reaches or passes the target,
// so the realized population lands in [target, target + 11]. Member fields
// are drawn independently from the marginals, age then sex then race.
Dataset synthesize_tract(const TractSpec& spec, uint64_t seed);

TractSpec parse_tract_spec_json(const std::string& text, const std::string& origin);
TractSpec load_tract_spec(const std::string& path);
std::string tract_spec_to_json(const TractSpec& spec);

}  // namespace deid

#endif  // DEID_SYNTHESIS_HPP_
