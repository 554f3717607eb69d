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

#include "deid/dp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deid/errors.hpp"

namespace deid {

void DpConfig::validate() const {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw ConfigError("epsilon must be positive and finite");
  }
}

int64_t sample_geometric(double epsilon, Rng& rng) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw ConfigError("epsilon must be positive and finite");
  }
  const double alpha = std::exp(-epsilon);
  const double log_alpha = -epsilon;
  const double u = rng.uniform01();
  // P[Z <= z] = alpha^(-z) / (1 + alpha) for z <= 0, else
  // 1 - alpha^(z+1) / (1 + alpha); invert whichever side u falls on.
  double z;
  if (u < 1.0 / (1.0 + alpha)) {
    z = -std::floor(std::log(u * (1.0 + alpha)) / log_alpha);
  } else {
    z = std::ceil(std::log((1.0 - u) * (1.0 + alpha)) / log_alpha - 1.0);
  }
  // Representable-range guard for extreme epsilon; unreachable for any
  // epsilon above ~1e-17.
  z = std::clamp(z, -9.0e18, 9.0e18);
  return static_cast<int64_t>(z);
}

double geometric_p_zero(double epsilon) {
  const double alpha = std::exp(-epsilon);
  return (1.0 - alpha) / (1.0 + alpha);
}

double geometric_std(double epsilon) {
  const double alpha = std::exp(-epsilon);
  return std::sqrt(2.0 * alpha) / (1.0 - alpha);
}

double geometric_mean_abs(double epsilon) {
  const double alpha = std::exp(-epsilon);
  return 2.0 * alpha / (1.0 - alpha * alpha);
}

AgeHistogram privatize_histogram(const AgeHistogram& hist, const DpConfig& config) {
  config.validate();
  for (int64_t c : hist.counts) {
    if (c < 0) throw std::invalid_argument("true histogram has a negative count");
  }
  Rng rng(config.seed);
  AgeHistogram out;
  out.geo = hist.geo;
  for (int a = 0; a < kAgeCount; ++a) {
    out.counts[a] = hist.counts[a] + sample_geometric(config.epsilon, rng);
    if (config.clamp_negative && out.counts[a] < 0) out.counts[a] = 0;
  }
  return out;
}

}  // namespace deid
