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

// deidbench: synthesize tract microdata, run household swapping or geometric
// noise over it, score the result with MAPE, and sweep parameter grids.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deid/dataset.hpp"
#include "deid/dp.hpp"
#include "deid/errors.hpp"
#include "deid/experiment.hpp"
#include "deid/metrics.hpp"
#include "deid/microdata_io.hpp"
#include "deid/presets.hpp"
#include "deid/rng.hpp"
#include "deid/strings.hpp"
#include "deid/swap.hpp"
#include "deid/synthesis.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw deid::DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw deid::DataError("cannot write '" + path + "'");
  out << content;
  if (!out) throw deid::DataError("write to '" + path + "' failed");
}

// Either microdata or a noisy-histogram release, told apart by header.
struct EvalInput {
  std::optional<deid::Dataset> dataset;
  std::optional<deid::NoisyHistograms> noisy;
};

EvalInput load_eval_input(const std::string& path) {
  const std::string text = read_file(path);
  std::string_view first_line(text);
  if (const size_t nl = first_line.find('\n'); nl != std::string_view::npos) {
    first_line = first_line.substr(0, nl);
  }
  if (!first_line.empty() && first_line.back() == '\r') first_line.remove_suffix(1);
  EvalInput input;
  if (first_line == deid::kMicrodataHeader) {
    input.dataset = deid::parse_microdata_csv(text, path);
  } else {
    input.noisy = deid::parse_noisy_histograms_csv(text, path);
  }
  return input;
}

std::vector<deid::GeoId> eval_tracts(const EvalInput& input) {
  if (input.dataset.has_value()) return input.dataset->tracts();
  std::vector<deid::GeoId> out;
  for (const deid::AgeHistogram& h : input.noisy->histograms) out.push_back(h.geo);
  return out;
}

deid::AgeHistogram eval_histogram(const EvalInput& input, const deid::GeoId& geo) {
  if (input.dataset.has_value()) return deid::age_histogram(*input.dataset, geo);
  for (const deid::AgeHistogram& h : input.noisy->histograms) {
    if (h.geo == geo) return h;
  }
  throw deid::DataError("tract " + geo.str() + " missing from modified input");
}

int run_synth(const std::string& preset_name, const std::string& spec_path, bool roster,
              std::optional<uint64_t> seed, const std::string& out_path) {
  deid::Dataset dataset;
  if (roster) {
    dataset = deid::synthesize_roster();
  } else if (!preset_name.empty()) {
    const deid::TractPreset* preset = deid::find_preset(preset_name);
    if (preset == nullptr) {
      std::string names;
      for (const deid::TractPreset& p : deid::preset_roster()) {
        if (!names.empty()) names += ", ";
        names += p.name;
      }
      throw deid::ConfigError("unknown preset '" + preset_name + "'; available: " + names);
    }
    dataset = deid::synthesize_tract(preset->spec, seed.value_or(preset->synth_seed));
  } else {
    const deid::TractSpec spec = deid::load_tract_spec(spec_path);
    dataset = deid::synthesize_tract(spec, seed.value_or(0));
  }
  deid::save_microdata(dataset, out_path);
  std::cout << "wrote " << out_path << " (" << dataset.household_count() << " households, "
            << dataset.person_count() << " persons)\n";
  return kExitOk;
}

int run_swap(const std::string& in_path, double rate, uint64_t seed,
             const std::string& policy, const std::string& out_path,
             std::string report_path) {
  deid::SwapConfig config;
  config.swap_rate = rate;
  config.seed = seed;
  config.fallback_policy = deid::fallback_policy_from_string(policy);
  const deid::Dataset input = deid::load_microdata(in_path);
  const auto [swapped, report] = deid::swap_dataset(input, config);
  deid::save_microdata(swapped, out_path);
  if (report_path.empty()) {
    report_path = out_path + ".report.json";
  }
  write_file(report_path, deid::swap_report_to_json(report));
  std::cout << "wrote " << out_path << " (" << report.pairs.size() << " pairs) and "
            << report_path << "\n";
  return kExitOk;
}

int run_dp(const std::string& in_path, double epsilon, uint64_t seed, bool clamp,
           const std::string& format, const std::string& out_path) {
  const deid::Dataset input = deid::load_microdata(in_path);
  deid::NoisyHistograms noisy;
  noisy.config.epsilon = epsilon;
  noisy.config.seed = seed;
  noisy.config.clamp_negative = clamp;
  noisy.config.validate();
  for (const deid::GeoId& geo : input.tracts()) {
    deid::DpConfig per_tract = noisy.config;
    // One independent stream per tract, derived from its identity.
    per_tract.seed = deid::derive_seed(seed, "dp", geo.str());
    noisy.histograms.push_back(
        deid::privatize_histogram(deid::age_histogram(input, geo), per_tract));
  }
  if (format == "csv") {
    write_file(out_path, deid::noisy_histograms_to_csv(noisy));
  } else if (format == "json") {
    write_file(out_path, deid::noisy_histograms_to_json(noisy));
  } else {
    throw deid::ConfigError("unknown dp output format '" + format + "'");
  }
  std::cout << "wrote " << out_path << " (" << noisy.histograms.size() << " tracts)\n";
  return kExitOk;
}

int run_eval(const std::string& truth_path, const std::string& modified_path,
             const std::string& range_label, std::optional<int> lo, std::optional<int> hi) {
  std::vector<deid::AgeRange> ranges;
  if (lo.has_value() || hi.has_value()) {
    if (!lo.has_value() || !hi.has_value()) {
      throw deid::ConfigError("--lo and --hi must be given together");
    }
    deid::AgeRange custom{*lo, *hi,
                          std::to_string(*lo) + "-" + std::to_string(*hi)};
    custom.validate();
    ranges.push_back(custom);
  } else if (!range_label.empty()) {
    for (const deid::AgeRange& r : deid::default_age_ranges()) {
      if (r.label == range_label) ranges.push_back(r);
    }
    if (ranges.empty()) {
      throw deid::ConfigError("unknown range label '" + range_label +
                              "' (expected total, under18, or age4-5)");
    }
  } else {
    ranges = deid::default_age_ranges();
  }

  const deid::Dataset truth = deid::load_microdata(truth_path);
  const EvalInput modified = load_eval_input(modified_path);

  std::cout << "tract,range_label,mape,omitted_ages\n";
  for (const deid::GeoId& geo : eval_tracts(modified)) {
    if (!truth.contains_tract(geo)) {
      throw deid::DataError("tract " + geo.str() + " missing from truth input");
    }
    const deid::AgeHistogram true_hist = deid::age_histogram(truth, geo);
    const deid::AgeHistogram mod_hist = eval_histogram(modified, geo);
    for (const deid::AgeRange& range : ranges) {
      const deid::MapeResult m = deid::mape(true_hist, mod_hist, range);
      std::cout << geo.str() << ',' << range.label << ','
                << (m.value.has_value() ? deid::format_double(*m.value * 100.0) : "NA") << ','
                << m.omitted << '\n';
    }
  }
  return kExitOk;
}

int run_grid_cmd(const std::string& config_path, const std::string& output_dir,
                 std::optional<int> workers, bool serial) {
  deid::ExperimentConfig config =
      config_path.empty() ? deid::default_config() : deid::load_experiment_config(config_path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  if (config.output_dir.empty()) config.output_dir = ".";
  if (workers.has_value()) config.workers = *workers;
  const deid::ResultsTable table =
      serial ? deid::run_grid_serial(config) : deid::run_grid(config);
  std::vector<std::string> written;
  for (const deid::ReportFormat format :
       {deid::ReportFormat::kCsv, deid::ReportFormat::kJson, deid::ReportFormat::kPlotData}) {
    for (std::string& path : deid::emit_report(table, format, config.output_dir)) {
      written.push_back(std::move(path));
    }
  }
  std::cout << table.rows.size() << " result rows\n";
  for (const std::string& path : written) std::cout << "wrote " << path << "\n";
  return kExitOk;
}

int run_report(const std::string& in_path, const std::string& format,
               const std::string& out_dir) {
  const deid::ResultsTable table = deid::results_from_json(read_file(in_path), in_path);
  const auto written = deid::emit_report(table, deid::report_format_from_string(format), out_dir);
  for (const std::string& path : written) std::cout << "wrote " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"household swapping and geometric-noise benchmark over tract microdata"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize tract microdata");
  std::string synth_preset;
  std::string synth_spec;
  bool synth_roster = false;
  std::optional<uint64_t> synth_seed;
  std::string synth_out = "microdata.csv";
  auto* preset_opt = synth->add_option("--preset", synth_preset, "built-in tract preset name");
  auto* spec_opt = synth->add_option("--spec", synth_spec, "TractSpec JSON file");
  auto* roster_opt = synth->add_flag("--roster", synth_roster, "all built-in presets");
  synth->add_option("--seed", synth_seed, "synthesis seed (defaults to the preset's pin)");
  synth->add_option("-o,--output", synth_out, "output microdata CSV path");
  preset_opt->excludes(spec_opt)->excludes(roster_opt);
  spec_opt->excludes(roster_opt);

  // swap
  auto* swap = app.add_subcommand("swap", "swap households between tracts");
  std::string swap_in;
  double swap_rate = 0.02;
  uint64_t swap_seed = 0;
  std::string swap_policy = "relax_to_size";
  std::string swap_out = "swapped.csv";
  std::string swap_report;
  swap->add_option("-i,--input", swap_in, "input microdata CSV")->required();
  swap->add_option("--rate", swap_rate, "fraction of households to swap, 0 to 0.5");
  swap->add_option("--seed", swap_seed, "swap seed");
  swap->add_option("--policy", swap_policy, "strict, relax_to_size, or relax_to_any");
  swap->add_option("-o,--output", swap_out, "output microdata CSV path");
  swap->add_option("--report", swap_report, "swap report JSON path (default: <output>.report.json)");

  // dp
  auto* dp = app.add_subcommand("dp", "release noisy age histograms");
  std::string dp_in;
  double dp_epsilon = 1.0;
  uint64_t dp_seed = 0;
  bool dp_clamp = false;
  std::string dp_format = "csv";
  std::string dp_out = "noisy.csv";
  dp->add_option("-i,--input", dp_in, "input microdata CSV")->required();
  dp->add_option("--epsilon", dp_epsilon, "privacy-loss parameter, positive");
  dp->add_option("--seed", dp_seed, "noise seed");
  dp->add_flag("--clamp-negative", dp_clamp, "raise negative noisy counts to zero");
  dp->add_option("--format", dp_format, "csv or json");
  dp->add_option("-o,--output", dp_out, "output path");

  // eval
  auto* eval = app.add_subcommand("eval", "score a modified release against ground truth");
  std::string eval_truth;
  std::string eval_modified;
  std::string eval_range;
  std::optional<int> eval_lo;
  std::optional<int> eval_hi;
  eval->add_option("--truth", eval_truth, "ground-truth microdata CSV")->required();
  eval->add_option("--modified", eval_modified, "microdata CSV or noisy-histogram CSV")
      ->required();
  eval->add_option("--range", eval_range, "range label: total, under18, or age4-5");
  eval->add_option("--lo", eval_lo, "custom range start age");
  eval->add_option("--hi", eval_hi, "custom range end age");

  // grid
  auto* grid = app.add_subcommand("grid", "sweep swap-rate and epsilon grids");
  std::string grid_config;
  std::string grid_out_dir;
  std::optional<int> grid_workers;
  bool grid_serial = false;
  grid->add_option("-c,--config", grid_config, "ExperimentConfig JSON (default: built-in)");
  grid->add_option("--output-dir", grid_out_dir, "directory for result files");
  grid->add_option("--workers", grid_workers, "max parallel cells (0 = all cores)");
  grid->add_flag("--serial", grid_serial, "use the single-threaded reference path");

  // report
  auto* report = app.add_subcommand("report", "re-emit results.json in another format");
  std::string report_in;
  std::string report_format = "csv";
  std::string report_out_dir = ".";
  report->add_option("-i,--input", report_in, "results.json from a grid run")->required();
  report->add_option("-f,--format", report_format, "csv, json, or plotdata");
  report->add_option("-o,--output-dir", report_out_dir, "directory for emitted files");

  try {
    app.parse(argc, argv);
    if (synth->parsed()) {
      if (synth_preset.empty() && synth_spec.empty() && !synth_roster) {
        throw deid::ConfigError("synth needs --preset, --spec, or --roster");
      }
      return run_synth(synth_preset, synth_spec, synth_roster, synth_seed, synth_out);
    }
    if (swap->parsed()) {
      return run_swap(swap_in, swap_rate, swap_seed, swap_policy, swap_out, swap_report);
    }
    if (dp->parsed()) {
      return run_dp(dp_in, dp_epsilon, dp_seed, dp_clamp, dp_format, dp_out);
    }
    if (eval->parsed()) {
      return run_eval(eval_truth, eval_modified, eval_range, eval_lo, eval_hi);
    }
    if (grid->parsed()) {
      return run_grid_cmd(grid_config, grid_out_dir, grid_workers, grid_serial);
    }
    if (report->parsed()) {
      return run_report(report_in, report_format, report_out_dir);
    }
    return kExitUnexpected;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const deid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const deid::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
}
