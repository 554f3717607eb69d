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

#include <charconv>
#include <map>
#include <sstream>

#include <json.hpp>

#include "deid/dp.hpp"
#include "deid/errors.hpp"
#include "deid/strings.hpp"

namespace deid {

namespace {

constexpr std::string_view kNoisyHeader = "tract,age,true_count_omitted_flag,noisy_count";

int64_t parse_i64(std::string_view field, const std::string& origin, size_t line) {
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw DataError(origin + ":" + std::to_string(line) + ": malformed integer '" +
                    std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::string noisy_histograms_to_csv(const NoisyHistograms& noisy) {
  std::string out;
  out += "# epsilon=" + format_double(noisy.config.epsilon) + "\n";
  out += "# seed=" + std::to_string(noisy.config.seed) + "\n";
  out += std::string("# clamp_negative=") + (noisy.config.clamp_negative ? "1" : "0") + "\n";
  out += kNoisyHeader;
  out += '\n';
  for (const AgeHistogram& hist : noisy.histograms) {
    const std::string tract = hist.geo.str();
    for (int a = 0; a < kAgeCount; ++a) {
      out += tract;
      out += ',';
      out += std::to_string(a);
      // True counts are withheld from every release, so the omission flag
      // is constant.
      out += ",1,";
      out += std::to_string(hist.counts[a]);
      out += '\n';
    }
  }
  return out;
}

std::string noisy_histograms_to_json(const NoisyHistograms& noisy) {
  nlohmann::json j;
  j["epsilon"] = noisy.config.epsilon;
  j["seed"] = noisy.config.seed;
  j["clamp_negative"] = noisy.config.clamp_negative;
  j["histograms"] = nlohmann::json::array();
  for (const AgeHistogram& hist : noisy.histograms) {
    j["histograms"].push_back({{"tract", hist.geo.str()}, {"counts", hist.counts}});
  }
  return j.dump(2) + "\n";
}

NoisyHistograms parse_noisy_histograms_csv(const std::string& text,
                                           const std::string& origin) {
  NoisyHistograms out;
  std::map<std::string, size_t> tract_slot;
  std::istringstream stream(text);
  std::string raw;
  size_t line_no = 0;
  bool saw_header = false;
  bool saw_epsilon = false;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view meta = line.substr(1);
      while (!meta.empty() && meta.front() == ' ') meta.remove_prefix(1);
      const size_t eq = meta.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string_view key = meta.substr(0, eq);
      const std::string value(meta.substr(eq + 1));
      if (key == "epsilon") {
        out.config.epsilon = std::strtod(value.c_str(), nullptr);
        saw_epsilon = true;
      } else if (key == "seed") {
        out.config.seed = std::stoull(value);
      } else if (key == "clamp_negative") {
        out.config.clamp_negative = value == "1" || value == "true";
      }
      continue;
    }
    if (!saw_header) {
      if (line != kNoisyHeader) {
        throw DataError(origin + ":" + std::to_string(line_no) + ": expected header '" +
                        std::string(kNoisyHeader) + "'");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected 4 fields, got " +
                      std::to_string(fields.size()));
    }
    GeoId geo;
    try {
      geo = GeoId::parse(fields[0]);
    } catch (const DataError& e) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const int64_t age = parse_i64(fields[1], origin, line_no);
    if (age < 0 || age > kMaxAge) {
      throw DataError(origin + ":" + std::to_string(line_no) + ": age out of range");
    }
    const int64_t flag = parse_i64(fields[2], origin, line_no);
    if (flag != 0 && flag != 1) {
      throw DataError(origin + ":" + std::to_string(line_no) +
                      ": true_count_omitted_flag must be 0 or 1");
    }
    const int64_t count = parse_i64(fields[3], origin, line_no);
    auto [it, inserted] = tract_slot.try_emplace(geo.str(), out.histograms.size());
    if (inserted) {
      AgeHistogram hist;
      hist.geo = geo;
      out.histograms.push_back(hist);
    }
    out.histograms[it->second].counts[age] = count;
  }
  if (!saw_header) throw DataError(origin + ": missing header row");
  if (!saw_epsilon) throw DataError(origin + ": missing '# epsilon=' metadata");
  return out;
}

}  // namespace deid
