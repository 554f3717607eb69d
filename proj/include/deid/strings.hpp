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

#ifndef DEID_STRINGS_HPP_
#define DEID_STRINGS_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace deid {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Split on commas; no quoting or escaping, fields may be empty.
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace deid

#endif  // DEID_STRINGS_HPP_
