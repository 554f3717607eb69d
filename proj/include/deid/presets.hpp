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

#ifndef DEID_PRESETS_HPP_
#define DEID_PRESETS_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "deid/dataset.hpp"
#include "deid/synthesis.hpp"

namespace deid {

// A named tract scenario with a pinned synthesis seed. The seeds are chosen
// so the realized population equals the target exactly, and the two anchor
// tracts hit their exact ages-4-and-5 counts (56 for RI-7-40200, 13 for
// RI-7-51000). Ground truths are therefore stable across configs.
struct TractPreset {
  std::string name;
  TractSpec spec;
  uint64_t synth_seed = 0;
};

// Seven tracts ordered by population: two small Rhode Island tracts (one
// young-family, one heavily elderly with small households), three mid-size,
// and two larger ones. Populations: 1158, 1508, 2632, 3771, 4068, 8415,
// 12267.
const std::vector<TractPreset>& preset_roster();

// nullptr when no preset has that name.
const TractPreset* find_preset(std::string_view name);

Dataset synthesize_preset(const TractPreset& preset);
// All roster tracts merged into one dataset.
Dataset synthesize_roster();

}  // namespace deid

#endif  // DEID_PRESETS_HPP_
