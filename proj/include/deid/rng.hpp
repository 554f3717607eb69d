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

#ifndef DEID_RNG_HPP_
#define DEID_RNG_HPP_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deid/errors.hpp"

namespace deid {

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// splitmix64 step; full-period 64-bit mixer.
inline uint64_t mix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

namespace detail {
inline uint64_t seed_bits(uint64_t v) { return v; }
inline uint64_t seed_bits(int v) { return static_cast<uint64_t>(static_cast<int64_t>(v)); }
inline uint64_t seed_bits(double v) { return std::bit_cast<uint64_t>(v); }
inline uint64_t seed_bits(std::string_view v) { return fnv1a(v); }
inline uint64_t seed_bits(const std::string& v) { return fnv1a(v); }
inline uint64_t seed_bits(const char* v) { return fnv1a(v); }
}  // namespace detail

// Stable 64-bit seed from heterogeneous parts. Derived from values, never
// from positions, so extending a grid cannot shift existing streams.
template <typename... Parts>
uint64_t derive_seed(uint64_t base, const Parts&... parts) {
  uint64_t h = mix64(base);
  ((h = mix64(h ^ detail::seed_bits(parts))), ...);
  return h;
}

// Deterministic stream over mt19937_64. All variates are produced with
// hand-specified transforms (no std distributions), so equal seeds give
// equal sequences on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n). Masked rejection.
  uint64_t below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t mask = ~uint64_t{0} >> std::countl_zero(n - 1);
    uint64_t v;
    do {
      v = next() & mask;
    } while (v >= n);
    return v;
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[static_cast<size_t>(below(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF sampling from non-negative weights. Zero-weight categories
// are never drawn.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> weights) {
    if (weights.empty()) throw ConfigError("categorical weights are empty");
    double total = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) {
        throw ConfigError("categorical weights must be finite and non-negative");
      }
      total += w;
    }
    if (total <= 0.0) throw ConfigError("categorical weights have no positive mass");
    cdf_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      acc += w / total;
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }

  int sample(Rng& rng) const {
    const double u = rng.uniform01();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<int>(it - cdf_.begin());
  }

  size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace deid

#endif  // DEID_RNG_HPP_
