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

#ifndef DEID_MICRODATA_IO_HPP_
#define DEID_MICRODATA_IO_HPP_

#include <string>
#include <string_view>

#include "deid/dataset.hpp"

namespace deid {

inline constexpr std::string_view kMicrodataHeader =
    "state,county,tract,household_id,person_id,age,sex,race";

// Errors cite 1-based line numbers and the origin (file path or caller tag).
Dataset parse_microdata_csv(std::string_view text, std::string_view origin);
Dataset load_microdata(const std::string& path);

// Canonical form: header, then rows sorted by (geography, household id),
// person_id rewritten as the 1-based member index, LF line endings.
std::string canonical_csv(const Dataset& dataset);
void save_microdata(const Dataset& dataset, const std::string& path);

}  // namespace deid

#endif  // DEID_MICRODATA_IO_HPP_
