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

#ifndef DEID_EXPERIMENT_HPP_
#define DEID_EXPERIMENT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deid/dataset.hpp"
#include "deid/metrics.hpp"
#include "deid/swap.hpp"
#include "deid/synthesis.hpp"

namespace deid {

inline constexpr std::string_view kVersion = "0.1.0";

// One tract to include in a grid: a named preset, an inline spec, or a
// microdata CSV (whose tracts are all evaluated). Exactly one of the three.
struct TractSource {
  std::optional<std::string> preset;
  std::optional<TractSpec> spec;
  std::optional<std::string> microdata;
  // Overrides the preset's pinned seed or the master-seed-derived default.
  std::optional<uint64_t> synth_seed;

  void validate() const;
};

struct ExperimentConfig {
  std::vector<TractSource> tracts;
  std::vector<double> swap_rates;
  std::vector<double> epsilons;
  int runs_per_param = 5;
  std::vector<AgeRange> age_ranges;
  uint64_t master_seed = 42;
  std::string output_dir = ".";
  FallbackPolicy swap_fallback = FallbackPolicy::kRelaxToSize;
  // 0 = all hardware threads; DEIDBENCH_WORKERS caps either way.
  int workers = 0;

  void validate() const;
};

// Full preset roster, default grids, 5 runs per parameter, all three
// default ranges, master seed 42.
ExperimentConfig default_config();

ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::string& origin);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

// One run of one mechanism at one parameter, scored on one range.
struct RunRecord {
  GeoId tract;
  Mechanism mechanism = Mechanism::kSwap;
  double parameter = 0.0;
  AgeRange range;
  int run_index = 0;
  std::optional<double> mape;  // fraction; empty = undefined for this run
  int omitted_ages = 0;

  bool operator==(const RunRecord&) const = default;
};

struct Provenance {
  std::string config_hash;
  uint64_t master_seed = 0;
  std::string version;

  bool operator==(const Provenance&) const = default;
};

struct ResultsTable {
  // Sorted by (tract, mechanism, parameter, range, run_index).
  std::vector<RunRecord> rows;
  Provenance provenance;

  // Rows folded per (tract, mechanism, parameter, range).
  std::vector<EvalResult> aggregate() const;

  bool operator==(const ResultsTable&) const = default;
};

// Synthesized or loaded tracts merged into one dataset, with the reference
// histogram per evaluated tract. Preset ground truths use pinned seeds, so
// they do not move when master_seed changes.
struct GroundTruth {
  Dataset dataset;
  std::vector<GeoId> eval_tracts;
  std::map<GeoId, AgeHistogram> histograms;
};

GroundTruth build_ground_truth(const ExperimentConfig& config);

// Sweeps every (tract, mechanism, parameter, run) cell. Per-cell seeds are
// derived from the cell's values, never from grid positions, so extending a
// grid leaves existing cells' results untouched. Cells run in parallel when
// OpenMP is available.
ResultsTable run_grid(const ExperimentConfig& config);
// Reference implementation: same cells, same seeds, one thread, no OpenMP.
ResultsTable run_grid_serial(const ExperimentConfig& config);

// Grid over the elderly-outlier preset (RI-51000) and the similar-size
// young-family comparison tract (RI-40200); grids and seeds come from base.
ResultsTable scenario_outlier(const ExperimentConfig& base);
ResultsTable scenario_outlier();

enum class ReportFormat { kCsv, kJson, kPlotData };
std::string_view to_string(ReportFormat format);
// Throws ConfigError on an unknown name.
ReportFormat report_format_from_string(std::string_view name);

// Writes report files into dir (created if missing) and returns their
// paths. kCsv: runs.csv and aggregate.csv. kJson: results.json. kPlotData:
// one plot_<tract>_<range>.csv per (tract, range). CSV MAPE columns are in
// percent with NA for undefined; JSON keeps fractions and null.
std::vector<std::string> emit_report(const ResultsTable& table, ReportFormat format,
                                     const std::string& dir);

std::string results_to_json(const ResultsTable& table);
// Exact inverse of results_to_json. Throws DataError on malformed input.
ResultsTable results_from_json(const std::string& text, const std::string& origin);

// Thread count run_grid will actually use: `requested` (0 = hardware),
// capped by DEIDBENCH_WORKERS when set, 1 without OpenMP.
int effective_workers(int requested);

}  // namespace deid

#endif  // DEID_EXPERIMENT_HPP_
