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

#ifndef DEID_METRICS_HPP_
#define DEID_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deid/types.hpp"

namespace deid {

struct AgeRange {
  int lo = 0;
  int hi = kMaxAge;
  std::string label;

  // Throws ConfigError unless 0 <= lo <= hi <= 115.
  void validate() const;

  bool operator==(const AgeRange&) const = default;
};

AgeRange range_total();    // [0, 115], label "total"
AgeRange range_under18();  // [0, 17], label "under18"
AgeRange range_age4_5();   // [4, 5], label "age4-5"
std::vector<AgeRange> default_age_ranges();

// MAPE values are fractions here and everywhere in the API; reports convert
// to percent. An empty optional means every age in the range had true count
// zero, a state deliberately distinct from a MAPE of 0.
struct MapeResult {
  std::optional<double> value;
  int omitted = 0;  // ages skipped because the true count was zero
};

// Mean over ages in [range.lo, range.hi] with true count != 0 of
// |modified - true| / true. The denominator is always the true count.
MapeResult mape(const AgeHistogram& truth, const AgeHistogram& modified,
                const AgeRange& range);

// Mean of per-run MAPE fractions; empty input (every run undefined) yields
// an empty optional.
std::optional<double> mean_mape_over_runs(std::span<const double> run_mapes);

enum class Mechanism { kSwap, kDp };
std::string_view to_string(Mechanism mechanism);
// Throws ConfigError on an unknown name.
Mechanism mechanism_from_string(std::string_view name);

// Aggregate of all runs for one (tract, mechanism, parameter, range) cell.
struct EvalResult {
  GeoId tract;
  Mechanism mechanism = Mechanism::kSwap;
  double parameter = 0.0;  // swap rate or epsilon
  AgeRange range;
  std::vector<double> run_mapes;  // defined runs only
  int undefined_runs = 0;
  int64_t omitted_ages = 0;  // summed over all runs

  std::optional<double> mean_mape() const { return mean_mape_over_runs(run_mapes); }
};

}  // namespace deid

#endif  // DEID_METRICS_HPP_
