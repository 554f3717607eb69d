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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "deid/errors.hpp"
#include "deid/experiment.hpp"
#include "deid/strings.hpp"

namespace deid {

namespace {

using nlohmann::json;

constexpr std::string_view kRunsHeader =
    "tract,mechanism,parameter,range_label,run_index,mape,omitted_ages";
constexpr std::string_view kAggregateHeader =
    "tract,mechanism,parameter,range_label,mean_mape,min_mape,max_mape,runs,"
    "undefined_runs,omitted_ages";
constexpr std::string_view kPlotHeader = "mechanism,parameter,mean_mape,min_mape,max_mape";

// Reports carry MAPE in percent; the API carries fractions.
std::string percent_or_na(const std::optional<double>& fraction) {
  if (!fraction.has_value()) return "NA";
  return format_double(*fraction * 100.0);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw DataError("write to '" + path + "' failed");
}

std::string safe_filename_part(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
    if (!ok) c = '_';
  }
  return out;
}

json range_to_json(const AgeRange& range) {
  return json{{"lo", range.lo}, {"hi", range.hi}, {"label", range.label}};
}

AgeRange range_from_json(const json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi") || !j.contains("label") ||
      !j.at("lo").is_number_integer() || !j.at("hi").is_number_integer() ||
      !j.at("label").is_string()) {
    throw DataError(origin + ": malformed age range");
  }
  AgeRange range;
  range.lo = j.at("lo").get<int>();
  range.hi = j.at("hi").get<int>();
  range.label = j.at("label").get<std::string>();
  return range;
}

}  // namespace

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kJson: return "json";
    case ReportFormat::kPlotData: return "plotdata";
  }
  throw ConfigError("invalid report format value");
}

ReportFormat report_format_from_string(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "plotdata") return ReportFormat::kPlotData;
  throw ConfigError("unknown report format '" + std::string(name) + "'");
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  json j;
  j["tracts"] = json::array();
  for (const TractSource& src : config.tracts) {
    json s = json::object();
    if (src.preset.has_value()) s["preset"] = *src.preset;
    if (src.spec.has_value()) s["spec"] = json::parse(tract_spec_to_json(*src.spec));
    if (src.microdata.has_value()) s["microdata"] = *src.microdata;
    if (src.synth_seed.has_value()) s["synth_seed"] = *src.synth_seed;
    j["tracts"].push_back(std::move(s));
  }
  j["swap_rates"] = config.swap_rates;
  j["epsilons"] = config.epsilons;
  j["runs_per_param"] = config.runs_per_param;
  j["age_ranges"] = json::array();
  for (const AgeRange& r : config.age_ranges) j["age_ranges"].push_back(range_to_json(r));
  j["master_seed"] = config.master_seed;
  j["output_dir"] = config.output_dir;
  j["swap_fallback"] = std::string(to_string(config.swap_fallback));
  j["workers"] = config.workers;
  return j.dump(2) + "\n";
}

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": expected a JSON object");

  ExperimentConfig config = default_config();
  try {
    if (j.contains("tracts")) {
      if (!j.at("tracts").is_array()) throw ConfigError(origin + ": 'tracts' must be an array");
      config.tracts.clear();
      for (const json& s : j.at("tracts")) {
        if (!s.is_object()) throw ConfigError(origin + ": tract entries must be objects");
        TractSource src;
        if (s.contains("preset")) src.preset = s.at("preset").get<std::string>();
        if (s.contains("spec")) {
          src.spec = parse_tract_spec_json(s.at("spec").dump(), origin);
        }
        if (s.contains("microdata")) src.microdata = s.at("microdata").get<std::string>();
        if (s.contains("synth_seed")) src.synth_seed = s.at("synth_seed").get<uint64_t>();
        src.validate();
        config.tracts.push_back(std::move(src));
      }
    }
    if (j.contains("swap_rates")) config.swap_rates = j.at("swap_rates").get<std::vector<double>>();
    if (j.contains("epsilons")) config.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (j.contains("runs_per_param")) config.runs_per_param = j.at("runs_per_param").get<int>();
    if (j.contains("age_ranges")) {
      if (!j.at("age_ranges").is_array()) {
        throw ConfigError(origin + ": 'age_ranges' must be an array");
      }
      config.age_ranges.clear();
      for (const json& r : j.at("age_ranges")) {
        try {
          config.age_ranges.push_back(range_from_json(r, origin));
        } catch (const DataError& e) {
          throw ConfigError(e.what());
        }
      }
    }
    if (j.contains("master_seed")) config.master_seed = j.at("master_seed").get<uint64_t>();
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("swap_fallback")) {
      config.swap_fallback =
          fallback_policy_from_string(j.at("swap_fallback").get<std::string>());
    }
    if (j.contains("workers")) config.workers = j.at("workers").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), path);
}

std::string results_to_json(const ResultsTable& table) {
  json j;
  j["provenance"] = {{"config_hash", table.provenance.config_hash},
                     {"master_seed", table.provenance.master_seed},
                     {"version", table.provenance.version}};
  j["rows"] = json::array();
  for (const RunRecord& row : table.rows) {
    json r;
    r["tract"] = row.tract.str();
    r["mechanism"] = std::string(to_string(row.mechanism));
    r["parameter"] = row.parameter;
    r["range"] = range_to_json(row.range);
    r["run_index"] = row.run_index;
    r["mape"] = row.mape.has_value() ? json(*row.mape) : json(nullptr);
    r["omitted_ages"] = row.omitted_ages;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

ResultsTable results_from_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(origin + ": " + e.what());
  }
  ResultsTable table;
  try {
    const json& prov = j.at("provenance");
    table.provenance.config_hash = prov.at("config_hash").get<std::string>();
    table.provenance.master_seed = prov.at("master_seed").get<uint64_t>();
    table.provenance.version = prov.at("version").get<std::string>();
    for (const json& r : j.at("rows")) {
      RunRecord row;
      row.tract = GeoId::parse(r.at("tract").get<std::string>());
      try {
        row.mechanism = mechanism_from_string(r.at("mechanism").get<std::string>());
      } catch (const ConfigError& e) {
        throw DataError(origin + ": " + e.what());
      }
      row.parameter = r.at("parameter").get<double>();
      row.range = range_from_json(r.at("range"), origin);
      row.run_index = r.at("run_index").get<int>();
      if (!r.at("mape").is_null()) row.mape = r.at("mape").get<double>();
      row.omitted_ages = r.at("omitted_ages").get<int>();
      table.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw DataError(origin + ": " + e.what());
  }
  return table;
}

std::vector<std::string> emit_report(const ResultsTable& table, ReportFormat format,
                                     const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;

  if (format == ReportFormat::kCsv) {
    std::string runs;
    runs += kRunsHeader;
    runs += '\n';
    for (const RunRecord& row : table.rows) {
      runs += row.tract.str();
      runs += ',';
      runs += to_string(row.mechanism);
      runs += ',';
      runs += format_double(row.parameter);
      runs += ',';
      runs += row.range.label;
      runs += ',';
      runs += std::to_string(row.run_index);
      runs += ',';
      runs += percent_or_na(row.mape);
      runs += ',';
      runs += std::to_string(row.omitted_ages);
      runs += '\n';
    }
    const std::string runs_path = (std::filesystem::path(dir) / "runs.csv").string();
    write_text_file(runs_path, runs);
    written.push_back(runs_path);

    std::string agg;
    agg += kAggregateHeader;
    agg += '\n';
    for (const EvalResult& cell : table.aggregate()) {
      std::optional<double> min_mape;
      std::optional<double> max_mape;
      if (!cell.run_mapes.empty()) {
        const auto [lo, hi] = std::minmax_element(cell.run_mapes.begin(), cell.run_mapes.end());
        min_mape = *lo;
        max_mape = *hi;
      }
      agg += cell.tract.str();
      agg += ',';
      agg += to_string(cell.mechanism);
      agg += ',';
      agg += format_double(cell.parameter);
      agg += ',';
      agg += cell.range.label;
      agg += ',';
      agg += percent_or_na(cell.mean_mape());
      agg += ',';
      agg += percent_or_na(min_mape);
      agg += ',';
      agg += percent_or_na(max_mape);
      agg += ',';
      agg += std::to_string(cell.run_mapes.size());
      agg += ',';
      agg += std::to_string(cell.undefined_runs);
      agg += ',';
      agg += std::to_string(cell.omitted_ages);
      agg += '\n';
    }
    const std::string agg_path = (std::filesystem::path(dir) / "aggregate.csv").string();
    write_text_file(agg_path, agg);
    written.push_back(agg_path);
    return written;
  }

  if (format == ReportFormat::kJson) {
    const std::string path = (std::filesystem::path(dir) / "results.json").string();
    write_text_file(path, results_to_json(table));
    written.push_back(path);
    return written;
  }

  // One series file per (tract, range); aggregate() is already sorted that
  // way except ranges interleave with parameters, so group in a map pass.
  const std::vector<EvalResult> cells = table.aggregate();
  std::vector<std::pair<GeoId, AgeRange>> series;
  for (const EvalResult& cell : cells) {
    const std::pair<GeoId, AgeRange> key{cell.tract, cell.range};
    if (std::find(series.begin(), series.end(), key) == series.end()) {
      series.push_back(key);
    }
  }
  for (const auto& [tract, range] : series) {
    std::string body;
    body += kPlotHeader;
    body += '\n';
    for (const EvalResult& cell : cells) {
      if (cell.tract != tract || cell.range != range) continue;
      std::optional<double> min_mape;
      std::optional<double> max_mape;
      if (!cell.run_mapes.empty()) {
        const auto [lo, hi] = std::minmax_element(cell.run_mapes.begin(), cell.run_mapes.end());
        min_mape = *lo;
        max_mape = *hi;
      }
      body += to_string(cell.mechanism);
      body += ',';
      body += format_double(cell.parameter);
      body += ',';
      body += percent_or_na(cell.mean_mape());
      body += ',';
      body += percent_or_na(min_mape);
      body += ',';
      body += percent_or_na(max_mape);
      body += '\n';
    }
    const std::string name =
        "plot_" + safe_filename_part(tract.str()) + "_" + safe_filename_part(range.label) +
        ".csv";
    const std::string path = (std::filesystem::path(dir) / name).string();
    write_text_file(path, body);
    written.push_back(path);
  }
  return written;
}

}  // namespace deid
