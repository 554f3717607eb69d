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

#include "deid/metrics.hpp"

#include <cmath>
#include <cstdlib>

#include "deid/errors.hpp"

namespace deid {

void AgeRange::validate() const {
  if (lo < 0 || lo > hi || hi > kMaxAge) {
    throw ConfigError("age range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] is not within [0, " + std::to_string(kMaxAge) + "]");
  }
  if (label.empty()) {
    throw ConfigError("age range label must not be empty");
  }
}

AgeRange range_total() { return {0, kMaxAge, "total"}; }
AgeRange range_under18() { return {0, kAdultAge - 1, "under18"}; }
AgeRange range_age4_5() { return {4, 5, "age4-5"}; }

std::vector<AgeRange> default_age_ranges() {
  return {range_total(), range_under18(), range_age4_5()};
}

MapeResult mape(const AgeHistogram& truth, const AgeHistogram& modified,
                const AgeRange& range) {
  range.validate();
  MapeResult result;
  double sum = 0.0;
  int defined = 0;
  for (int a = range.lo; a <= range.hi; ++a) {
    const int64_t t = truth.counts[a];
    if (t == 0) {
      ++result.omitted;
      continue;
    }
    sum += std::abs(static_cast<double>(modified.counts[a]) - static_cast<double>(t)) /
           std::abs(static_cast<double>(t));
    ++defined;
  }
  if (defined > 0) result.value = sum / defined;
  return result;
}

std::optional<double> mean_mape_over_runs(std::span<const double> run_mapes) {
  if (run_mapes.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : run_mapes) sum += v;
  return sum / static_cast<double>(run_mapes.size());
}

std::string_view to_string(Mechanism mechanism) {
  return mechanism == Mechanism::kSwap ? "swap" : "dp";
}

Mechanism mechanism_from_string(std::string_view name) {
  if (name == "swap") return Mechanism::kSwap;
  if (name == "dp") return Mechanism::kDp;
  throw ConfigError("unknown mechanism '" + std::string(name) + "'");
}

}  // namespace deid
