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

#include "deid/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <set>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "deid/dp.hpp"
#include "deid/errors.hpp"
#include "deid/microdata_io.hpp"
#include "deid/presets.hpp"
#include "deid/rng.hpp"

namespace deid {

namespace {

struct Cell {
  Mechanism mechanism;
  double parameter;
  GeoId tract;
  int run;
};

std::vector<Cell> enumerate_cells(const ExperimentConfig& config,
                                  const std::vector<GeoId>& tracts) {
  std::vector<Cell> cells;
  cells.reserve((config.swap_rates.size() + config.epsilons.size()) * tracts.size() *
                static_cast<size_t>(config.runs_per_param));
  for (const GeoId& tract : tracts) {
    for (double rate : config.swap_rates) {
      for (int run = 0; run < config.runs_per_param; ++run) {
        cells.push_back({Mechanism::kSwap, rate, tract, run});
      }
    }
    for (double eps : config.epsilons) {
      for (int run = 0; run < config.runs_per_param; ++run) {
        cells.push_back({Mechanism::kDp, eps, tract, run});
      }
    }
  }
  return cells;
}

std::string cell_context(const Cell& cell) {
  return "tract " + cell.tract.str() + ", " + std::string(to_string(cell.mechanism)) +
         " parameter " + std::to_string(cell.parameter) + ", run " +
         std::to_string(cell.run);
}

std::vector<RunRecord> eval_cell(const GroundTruth& truth, const ExperimentConfig& config,
                                 const Cell& cell) {
  try {
    const AgeHistogram& true_hist = truth.histograms.at(cell.tract);
    const uint64_t seed =
        derive_seed(config.master_seed, to_string(cell.mechanism), cell.tract.str(),
                    cell.parameter, static_cast<uint64_t>(cell.run));
    AgeHistogram modified;
    if (cell.mechanism == Mechanism::kDp) {
      DpConfig dp;
      dp.epsilon = cell.parameter;
      dp.seed = seed;
      modified = privatize_histogram(true_hist, dp);
    } else {
      SwapConfig swap;
      swap.swap_rate = cell.parameter;
      swap.seed = seed;
      swap.fallback_policy = config.swap_fallback;
      const SwapReport report = plan_swaps(truth.dataset, swap);
      modified = swapped_histogram(truth.dataset, report, cell.tract);
    }
    std::vector<RunRecord> rows;
    rows.reserve(config.age_ranges.size());
    for (const AgeRange& range : config.age_ranges) {
      const MapeResult m = mape(true_hist, modified, range);
      RunRecord row;
      row.tract = cell.tract;
      row.mechanism = cell.mechanism;
      row.parameter = cell.parameter;
      row.range = range;
      row.run_index = cell.run;
      row.mape = m.value;
      row.omitted_ages = m.omitted;
      rows.push_back(std::move(row));
    }
    return rows;
  } catch (const ConfigError& e) {
    throw ConfigError(cell_context(cell) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(cell_context(cell) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(cell_context(cell) + ": " + e.what());
  }
}

bool row_less(const RunRecord& a, const RunRecord& b) {
  if (a.tract != b.tract) return a.tract < b.tract;
  if (a.mechanism != b.mechanism) return a.mechanism < b.mechanism;
  if (a.parameter != b.parameter) return a.parameter < b.parameter;
  if (a.range.lo != b.range.lo) return a.range.lo < b.range.lo;
  if (a.range.hi != b.range.hi) return a.range.hi < b.range.hi;
  if (a.range.label != b.range.label) return a.range.label < b.range.label;
  return a.run_index < b.run_index;
}

ResultsTable run_grid_impl(const ExperimentConfig& config, bool parallel) {
  config.validate();
  const GroundTruth truth = build_ground_truth(config);
  const std::vector<Cell> cells = enumerate_cells(config, truth.eval_tracts);

  std::vector<std::vector<RunRecord>> slots(cells.size());
  std::vector<std::exception_ptr> failures(cells.size());
  const int64_t n = static_cast<int64_t>(cells.size());
  if (parallel) {
    const int workers = effective_workers(config.workers);
    (void)workers;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (int64_t i = 0; i < n; ++i) {
      try {
        slots[i] = eval_cell(truth, config, cells[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  } else {
    for (int64_t i = 0; i < n; ++i) {
      try {
        slots[i] = eval_cell(truth, config, cells[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  }
  for (const std::exception_ptr& e : failures) {
    if (e) std::rethrow_exception(e);
  }

  ResultsTable table;
  table.rows.reserve(cells.size() * config.age_ranges.size());
  for (std::vector<RunRecord>& slot : slots) {
    for (RunRecord& row : slot) table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(), row_less);
  table.provenance.config_hash = [&config] {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(experiment_config_to_json(config))));
    return std::string(hex);
  }();
  table.provenance.master_seed = config.master_seed;
  table.provenance.version = std::string(kVersion);
  return table;
}

}  // namespace

void TractSource::validate() const {
  const int sources = static_cast<int>(preset.has_value()) +
                      static_cast<int>(spec.has_value()) +
                      static_cast<int>(microdata.has_value());
  if (sources != 1) {
    throw ConfigError("tract source needs exactly one of preset, spec, microdata");
  }
  if (microdata.has_value() && synth_seed.has_value()) {
    throw ConfigError("synth_seed is meaningless for a microdata source");
  }
  if (spec.has_value()) spec->validate();
}

void ExperimentConfig::validate() const {
  if (tracts.empty()) throw ConfigError("config lists no tracts");
  for (const TractSource& src : tracts) src.validate();
  if (swap_rates.empty() && epsilons.empty()) {
    throw ConfigError("both parameter grids are empty");
  }
  for (double r : swap_rates) {
    if (!std::isfinite(r) || r < 0.0 || r > 0.5) {
      throw ConfigError("swap rate " + std::to_string(r) + " outside [0, 0.5]");
    }
  }
  for (double e : epsilons) {
    if (!std::isfinite(e) || e <= 0.0 || e > 10.0) {
      throw ConfigError("epsilon " + std::to_string(e) + " outside (0, 10]");
    }
  }
  if (runs_per_param < 1) throw ConfigError("runs_per_param must be at least 1");
  if (age_ranges.empty()) throw ConfigError("config lists no age ranges");
  for (const AgeRange& r : age_ranges) r.validate();
  if (workers < 0) throw ConfigError("workers must be non-negative");
}

ExperimentConfig default_config() {
  ExperimentConfig config;
  for (const TractPreset& p : preset_roster()) {
    TractSource src;
    src.preset = p.name;
    config.tracts.push_back(std::move(src));
  }
  config.swap_rates = {0.0, 0.02, 0.03, 0.04, 0.1, 0.25, 0.5};
  config.epsilons = {0.25, 0.5, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  config.runs_per_param = 5;
  config.age_ranges = default_age_ranges();
  config.master_seed = 42;
  return config;
}

GroundTruth build_ground_truth(const ExperimentConfig& config) {
  GroundTruth truth;
  Dataset merged;
  std::set<GeoId> seen;
  auto add_eval_tract = [&truth, &seen](const GeoId& geo) {
    if (!seen.insert(geo).second) {
      throw ConfigError("tract " + geo.str() + " appears in more than one source");
    }
    truth.eval_tracts.push_back(geo);
  };

  for (const TractSource& src : config.tracts) {
    src.validate();
    Dataset part;
    if (src.preset.has_value()) {
      const TractPreset* preset = find_preset(*src.preset);
      if (preset == nullptr) throw ConfigError("unknown preset '" + *src.preset + "'");
      part = synthesize_tract(preset->spec, src.synth_seed.value_or(preset->synth_seed));
      add_eval_tract(preset->spec.geo);
    } else if (src.spec.has_value()) {
      const uint64_t seed = src.synth_seed.value_or(
          derive_seed(config.master_seed, "synth", src.spec->geo.str()));
      part = synthesize_tract(*src.spec, seed);
      add_eval_tract(src.spec->geo);
    } else {
      part = load_microdata(*src.microdata);
      for (const GeoId& geo : part.tracts()) add_eval_tract(geo);
    }
    merged = merged.household_count() == 0 ? std::move(part) : Dataset::merge(merged, part);
  }
  truth.dataset = std::move(merged);
  for (const GeoId& geo : truth.eval_tracts) {
    truth.histograms.emplace(geo, age_histogram(truth.dataset, geo));
  }
  return truth;
}

ResultsTable run_grid(const ExperimentConfig& config) {
  return run_grid_impl(config, true);
}

ResultsTable run_grid_serial(const ExperimentConfig& config) {
  return run_grid_impl(config, false);
}

ResultsTable scenario_outlier(const ExperimentConfig& base) {
  ExperimentConfig config = base;
  config.tracts.clear();
  for (const char* name : {"RI-51000", "RI-40200"}) {
    TractSource src;
    src.preset = name;
    config.tracts.push_back(std::move(src));
  }
  return run_grid(config);
}

ResultsTable scenario_outlier() { return scenario_outlier(default_config()); }

std::vector<EvalResult> ResultsTable::aggregate() const {
  std::vector<EvalResult> out;
  for (size_t i = 0; i < rows.size();) {
    const RunRecord& first = rows[i];
    EvalResult agg;
    agg.tract = first.tract;
    agg.mechanism = first.mechanism;
    agg.parameter = first.parameter;
    agg.range = first.range;
    size_t j = i;
    for (; j < rows.size(); ++j) {
      const RunRecord& row = rows[j];
      if (row.tract != first.tract || row.mechanism != first.mechanism ||
          row.parameter != first.parameter || row.range != first.range) {
        break;
      }
      if (row.mape.has_value()) {
        agg.run_mapes.push_back(*row.mape);
      } else {
        ++agg.undefined_runs;
      }
      agg.omitted_ages += row.omitted_ages;
    }
    out.push_back(std::move(agg));
    i = j;
  }
  return out;
}

int effective_workers(int requested) {
#ifdef _OPENMP
  int workers = requested > 0 ? requested : omp_get_max_threads();
  if (const char* env = std::getenv("DEIDBENCH_WORKERS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) {
      workers = std::min(workers, static_cast<int>(cap));
    }
  }
  return std::max(1, workers);
#else
  (void)requested;
  return 1;
#endif
}

}  // namespace deid
