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

#ifndef DEID_DP_HPP_
#define DEID_DP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "deid/rng.hpp"
#include "deid/types.hpp"

namespace deid {

// Each person occupies exactly one age cell, so per-cell sensitivity is 1
// and the full epsilon applies to every cell (parallel composition across
// disjoint cells).
struct DpConfig {
  double epsilon = 0.0;
  uint64_t seed = 0;
  // Raising negative noisy counts to zero deviates from the released
  // mechanism; outputs carry the flag so downstream readers can tell.
  bool clamp_negative = false;

  // Throws ConfigError unless epsilon is positive and finite.
  void validate() const;
};

// One draw of two-sided geometric noise with alpha = exp(-epsilon):
// P[Z = z] = ((1 - alpha) / (1 + alpha)) * alpha^|z|. Inverse-CDF transform
// of a single uniform draw, so equal stream states give equal values on
// every platform.
int64_t sample_geometric(double epsilon, Rng& rng);

// Closed-form moments, used by tests and sanity checks.
double geometric_p_zero(double epsilon);
double geometric_std(double epsilon);
double geometric_mean_abs(double epsilon);

// Independent noise per age, one stream consumed in age order 0..115. No
// post-processing unless clamp_negative is set. Throws std::invalid_argument
// if the input has a negative count (not a Dataset-derived histogram).
AgeHistogram privatize_histogram(const AgeHistogram& hist, const DpConfig& config);

struct NoisyHistograms {
  DpConfig config;
  std::vector<AgeHistogram> histograms;
};

// CSV: '#'-prefixed metadata lines (epsilon, seed, clamp_negative), then
// header tract,age,true_count_omitted_flag,noisy_count. The flag is always 1:
// releases never carry true counts.
std::string noisy_histograms_to_csv(const NoisyHistograms& noisy);
std::string noisy_histograms_to_json(const NoisyHistograms& noisy);
NoisyHistograms parse_noisy_histograms_csv(const std::string& text,
                                           const std::string& origin);

}  // namespace deid

#endif  // DEID_DP_HPP_
