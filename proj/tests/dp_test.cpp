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

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "deid/errors.hpp"

using namespace deid;

namespace {

const GeoId kGeo{"RI", 7, "100"};

AgeHistogram histogram(const GeoId& geo = kGeo) {
  AgeHistogram h;
  h.geo = geo;
  return h;
}

// pmf of the two-sided geometric, straight from its definition.
double pmf(double epsilon, int64_t z) {
  const double alpha = std::exp(-epsilon);
  return (1.0 - alpha) / (1.0 + alpha) * std::pow(alpha, std::abs(static_cast<double>(z)));
}

std::map<int64_t, int64_t> sample_counts(double epsilon, int n, uint64_t seed) {
  Rng rng(seed);
  std::map<int64_t, int64_t> counts;
  for (int i = 0; i < n; ++i) ++counts[sample_geometric(epsilon, rng)];
  return counts;
}

}  // namespace

TEST_CASE("closed-form moments match their definitions") {
  for (const double eps : {0.1, 0.5, 1.0, 2.0, 8.0}) {
    const double alpha = std::exp(-eps);
    CHECK(geometric_p_zero(eps) == doctest::Approx((1 - alpha) / (1 + alpha)).epsilon(1e-12));
    CHECK(geometric_std(eps) ==
          doctest::Approx(std::sqrt(2 * alpha) / (1 - alpha)).epsilon(1e-12));
    CHECK(geometric_mean_abs(eps) ==
          doctest::Approx(2 * alpha / (1 - alpha * alpha)).epsilon(1e-12));
  }
}

TEST_CASE("sampled frequencies track the pmf at unit epsilon") {
  const int n = 100000;
  const auto counts = sample_counts(1.0, n, 2026);
  for (int64_t z = -3; z <= 3; ++z) {
    const double expected = pmf(1.0, z);
    const auto it = counts.find(z);
    const double observed =
        it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    CHECK(std::abs(observed - expected) < 0.005);
  }
}

TEST_CASE("sample mean sits within four standard errors of zero") {
  const int n = 100000;
  for (const double eps : {0.1, 1.0, 5.0}) {
    Rng rng(11 + static_cast<uint64_t>(eps * 10));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(sample_geometric(eps, rng));
    const double margin = 4.0 * geometric_std(eps) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n) < margin);
  }
}

TEST_CASE("distribution is symmetric about zero") {
  const int n = 100000;
  const auto counts = sample_counts(1.0, n, 404);
  for (int64_t k = 1; k <= 3; ++k) {
    const auto pos = counts.find(k);
    const auto neg = counts.find(-k);
    const double p_pos = pos == counts.end() ? 0.0 : static_cast<double>(pos->second) / n;
    const double p_neg = neg == counts.end() ? 0.0 : static_cast<double>(neg->second) / n;
    CHECK(std::abs(p_pos - p_neg) < 0.01);
  }
}

TEST_CASE("large epsilon collapses the noise to zero") {
  const auto counts = sample_counts(10.0, 10000, 7);
  const auto it = counts.find(0);
  REQUIRE(it != counts.end());
  CHECK(static_cast<double>(it->second) / 10000 >= 0.999);
}

TEST_CASE("noise magnitude shrinks as epsilon grows") {
  const int n = 20000;
  std::map<double, double> mean_abs;
  for (const double eps : {0.5, 2.0, 8.0}) {
    Rng rng(99);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += std::abs(static_cast<double>(sample_geometric(eps, rng)));
    }
    mean_abs[eps] = sum / n;
    // Also close to the closed form.
    CHECK(std::abs(mean_abs[eps] - geometric_mean_abs(eps)) <
          0.2 + 4.0 * geometric_std(eps) / std::sqrt(static_cast<double>(n)));
  }
  CHECK(mean_abs[0.5] > mean_abs[2.0]);
  CHECK(mean_abs[2.0] > mean_abs[8.0]);
}

TEST_CASE("epsilon bounds are enforced") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_geometric(0.0, rng), ConfigError);
  CHECK_THROWS_AS(sample_geometric(-1.0, rng), ConfigError);
  DpConfig bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.epsilon = -2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.epsilon = 1.0;
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("privatize_histogram is deterministic in the seed") {
  AgeHistogram h = histogram();
  for (int age = 0; age <= kMaxAge; ++age) h.counts[age] = age * 3 % 40;
  DpConfig cfg;
  cfg.epsilon = 1.0;
  cfg.seed = 123;
  const AgeHistogram a = privatize_histogram(h, cfg);
  const AgeHistogram b = privatize_histogram(h, cfg);
  CHECK(a == b);
  cfg.seed = 124;
  const AgeHistogram c = privatize_histogram(h, cfg);
  CHECK_FALSE(a == c);
  CHECK(a.geo == h.geo);
}

TEST_CASE("weak noise leaves most cells untouched") {
  AgeHistogram h = histogram();
  for (int age = 0; age <= kMaxAge; ++age) h.counts[age] = 10 + age;
  DpConfig cfg;
  cfg.epsilon = 10.0;
  cfg.seed = 5;
  const AgeHistogram out = privatize_histogram(h, cfg);
  int unchanged = 0;
  for (int age = 0; age <= kMaxAge; ++age) {
    if (out.counts[age] == h.counts[age]) ++unchanged;
  }
  CHECK(unchanged >= 110);
}

TEST_CASE("strong noise drives a zero histogram negative somewhere") {
  const AgeHistogram zeros = histogram();
  DpConfig cfg;
  cfg.epsilon = 0.1;
  cfg.seed = 9;
  const AgeHistogram out = privatize_histogram(zeros, cfg);
  bool negative = false;
  for (int age = 0; age <= kMaxAge; ++age) negative = negative || out.counts[age] < 0;
  CHECK(negative);

  cfg.clamp_negative = true;
  const AgeHistogram clamped = privatize_histogram(zeros, cfg);
  for (int age = 0; age <= kMaxAge; ++age) {
    CHECK(clamped.counts[age] >= 0);
    CHECK(clamped.counts[age] == std::max<int64_t>(out.counts[age], 0));
  }
}

TEST_CASE("negative input counts are rejected") {
  AgeHistogram h = histogram();
  h.counts[40] = -1;
  DpConfig cfg;
  cfg.epsilon = 1.0;
  CHECK_THROWS_AS(privatize_histogram(h, cfg), std::invalid_argument);
}

TEST_CASE("noisy count is unbiased for the true count") {
  AgeHistogram h = histogram();
  h.counts[4] = 13;
  DpConfig cfg;
  cfg.epsilon = 1.0;
  const int runs = 10000;
  double sum = 0.0;
  for (int r = 0; r < runs; ++r) {
    cfg.seed = 5000 + static_cast<uint64_t>(r);
    sum += static_cast<double>(privatize_histogram(h, cfg).counts[4]);
  }
  // sigma(1.0) ~= 1.19, so 4 standard errors is ~0.048.
  CHECK(std::abs(sum / runs - 13.0) < 0.5);
}

TEST_CASE("noise across ages is uncorrelated") {
  const AgeHistogram zeros = histogram();
  DpConfig cfg;
  cfg.epsilon = 1.0;
  const int runs = 4000;
  const int pairs[][2] = {{0, 1}, {10, 90}, {57, 58}};
  for (const auto& pair : pairs) {
    double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
    for (int r = 0; r < runs; ++r) {
      cfg.seed = 31000 + static_cast<uint64_t>(r);
      const AgeHistogram out = privatize_histogram(zeros, cfg);
      const double x = static_cast<double>(out.counts[pair[0]]);
      const double y = static_cast<double>(out.counts[pair[1]]);
      sx += x;
      sy += y;
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    const double n = runs;
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double vx = sxx / n - (sx / n) * (sx / n);
    const double vy = syy / n - (sy / n) * (sy / n);
    const double corr = cov / std::sqrt(vx * vy);
    CHECK(std::abs(corr) < 0.05);
  }
}

TEST_CASE("noisy release round-trips through csv") {
  AgeHistogram h1 = histogram(GeoId{"RI", 7, "100"});
  AgeHistogram h2 = histogram(GeoId{"RI", 7, "200"});
  for (int age = 0; age <= kMaxAge; ++age) {
    h1.counts[age] = age;
    h2.counts[age] = (age * 7) % 23 - 3;  // negatives survive the format
  }
  NoisyHistograms noisy;
  noisy.config.epsilon = 0.5;
  noisy.config.seed = 77;
  noisy.histograms = {h1, h2};

  const std::string csv = noisy_histograms_to_csv(noisy);
  CHECK(csv.find("# epsilon=") != std::string::npos);
  CHECK(csv.find("tract,age,true_count_omitted_flag,noisy_count") != std::string::npos);

  const NoisyHistograms back = parse_noisy_histograms_csv(csv, "mem");
  CHECK(back.config.epsilon == noisy.config.epsilon);
  CHECK(back.config.seed == noisy.config.seed);
  REQUIRE(back.histograms.size() == 2);
  CHECK(back.histograms[0] == h1);
  CHECK(back.histograms[1] == h2);
}

TEST_CASE("noisy csv parser reports the offending line") {
  AgeHistogram h = histogram();
  NoisyHistograms noisy;
  noisy.config.epsilon = 1.0;
  noisy.histograms = {h};
  std::string csv = noisy_histograms_to_csv(noisy);

  SUBCASE("missing epsilon metadata") {
    std::string stripped;
    size_t start = 0;
    while (start < csv.size()) {
      size_t end = csv.find('\n', start);
      if (end == std::string::npos) end = csv.size();
      const std::string line = csv.substr(start, end - start);
      if (line.rfind("# epsilon=", 0) != 0) {
        stripped += line;
        stripped += '\n';
      }
      start = end + 1;
    }
    CHECK_THROWS_AS(parse_noisy_histograms_csv(stripped, "x.csv"), DataError);
  }
  SUBCASE("bad flag value") {
    const size_t pos = csv.find(",1,");
    REQUIRE(pos != std::string::npos);
    csv.replace(pos, 3, ",2,");
    CHECK_THROWS_WITH_AS(parse_noisy_histograms_csv(csv, "x.csv"),
                         doctest::Contains("x.csv:"), DataError);
  }
  SUBCASE("truncated row") {
    csv += "RI-7-100,3\n";
    CHECK_THROWS_AS(parse_noisy_histograms_csv(csv, "x.csv"), DataError);
  }
}

TEST_CASE("noisy json names its fields") {
  AgeHistogram h = histogram();
  h.counts[0] = 4;
  NoisyHistograms noisy;
  noisy.config.epsilon = 2.0;
  noisy.config.seed = 3;
  noisy.histograms = {h};
  const std::string json = noisy_histograms_to_json(noisy);
  CHECK(json.find("\"epsilon\"") != std::string::npos);
  CHECK(json.find("\"histograms\"") != std::string::npos);
  CHECK(json.find("RI-7-100") != std::string::npos);
}
