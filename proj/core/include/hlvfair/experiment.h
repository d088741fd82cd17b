/*
 * Copyright 2026 The hlvfair Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Experiment orchestration behind the command-line tool: dataset
// validation, multi-seed training runs with a significance report, the
// configuration sweep and the temperature sweep. Every command writes its
// outputs under ExperimentSpec::out and is deterministic given the spec.
//
// Output layout:
//   dataset.jsonl, schema.json, synth.json   materialised input
//   runs/<method>_seed<seed>.json            one RunRecord per run
//   manifest.json                            completed/failed runs
//   report.csv, report.json                  per-method Perf / Fair
//   configs.jsonl                            sampled configurations
//   sweep_<method>.csv, summary_<method>.csv configuration sweep vs MV
//   temp_sweep_runs.csv, temp_sweep.csv      temperature sweep

#ifndef HLVFAIR_EXPERIMENT_H_
#define HLVFAIR_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hlvfair/aggregation.h"
#include "hlvfair/annotations.h"
#include "hlvfair/stats.h"
#include "hlvfair/synth.h"
#include "hlvfair/training.h"

namespace hlvfair {

struct SweepSettings {
  std::size_t n_configs = 10000;
  double alpha = kDefaultAlpha;
  std::size_t resamples = kDefaultResamples;
  std::size_t ci_resamples = 1000;
};

struct ExperimentSpec {
  std::filesystem::path dataset;
  std::filesystem::path schema;
  // Used instead of dataset/schema when set.
  std::optional<SynthConfig> synth;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::size_t runs = 3;
  // Hyperparameter template; method and seed are filled per run.
  TrainConfig train;
  FeatureSpec features;
  // nullopt: equal weights and p = 1 at both levels.
  std::optional<AggregationConfig> eval;
  SweepSettings sweep;
  std::vector<double> tau_grid{0.1, 0.5, 1.0, 2.0, 10.0};
  std::filesystem::path out = "hlvfair_out";
  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // Throws InvalidArgument.
  void Validate() const;
  AggregationConfig EvalConfig(const TaskSchema& schema) const;
};

// Relative paths inside the JSON resolve against `base_dir`.
ExperimentSpec ParseExperimentSpec(std::string_view json_text,
                                   const std::filesystem::path& base_dir);
ExperimentSpec LoadExperimentSpec(const std::filesystem::path& path);

// Loads or generates the dataset named by the spec.
Dataset LoadExperimentDataset(const ExperimentSpec& spec);

// Per-split, per-group subset sizes and agreement of a dataset.
struct DatasetSummary {
  struct GroupSizes {
    std::string group;
    std::size_t in[3] = {0, 0, 0};  // indexed by Split
    std::size_t out[3] = {0, 0, 0};
    std::size_t unknown[3] = {0, 0, 0};
  };
  std::size_t instances[3] = {0, 0, 0};
  std::size_t annotations = 0;
  std::vector<GroupSizes> groups;
  std::optional<double> alpha;
  std::vector<std::string> warnings;
};

DatasetSummary SummarizeDataset(const Dataset& dataset);
std::string FormatDatasetSummary(const DatasetSummary& summary);

struct ReportRow {
  Method method = Method::kMV;
  std::size_t runs = 0;
  double perf_mean = 0.0;
  double perf_sd = 0.0;
  double fair_mean = 0.0;
  double fair_sd = 0.0;
  // Bootstrap p-values against MV; unset on the MV row.
  std::optional<double> perf_p;
  std::optional<double> fair_p;
};

struct RunReport {
  double alpha = kDefaultAlpha;
  std::vector<ReportRow> rows;
};

// Trains methods x runs (seed = master seed + run index), saves RunRecords
// and the Perf/Fair report. On a training failure the manifest lists the
// completed runs and the error is rethrown.
RunReport CmdRun(const ExperimentSpec& spec);

// Loads the RunRecords of a finished CmdRun, grouped by method in spec
// order. Returns nullopt when the manifest is missing or incomplete.
std::optional<std::vector<MethodScores>> LoadRunScores(
    const ExperimentSpec& spec);

struct MethodSweep {
  Method method = Method::kSL;
  std::vector<SweepVerdict> verdicts;
  std::vector<FractionRow> summary;  // overall, p_group:*, p_class:*
};

// Runs CmdRun when needed, then sweeps every non-MV method against MV.
std::vector<MethodSweep> CmdSweep(const ExperimentSpec& spec);

struct TemperatureSummaryRow {
  double tau = 1.0;
  std::size_t n = 0;
  double perf_mean = 0.0;
  double perf_sd = 0.0;
  double fair_mean = 0.0;
  double fair_sd = 0.0;
};

struct TemperatureReport {
  std::vector<std::uint64_t> seeds;
  // per_seed[s][t] for seeds[s] and tau_grid[t].
  std::vector<std::vector<TemperatureRow>> per_seed;
  std::vector<TemperatureSummaryRow> summary;
};

// TemperatureSweep of SL for seeds master + 0 .. runs-1.
TemperatureReport CmdTempSweep(const ExperimentSpec& spec);

// Writes `content` to a sibling temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view content);

}  // namespace hlvfair

#endif  // HLVFAIR_EXPERIMENT_H_
