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

#include "hlvfair/experiment.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "hlvfair/error.h"
#include "hlvfair/metrics.h"
#include "hlvfair/random.h"
#include "json.hpp"
#include "parallel.h"

namespace hlvfair {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr Split kSplits[] = {Split::kTrain, Split::kDev, Split::kTest};

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

// Sample standard deviation, 0 for a single value.
double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = Mean(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

ordered_json SpecToJson(const ExperimentSpec& spec) {
  ordered_json j;
  if (spec.synth) {
    j["synth"] = ordered_json::parse(SynthConfigToJson(*spec.synth));
  } else {
    j["dataset"] = spec.dataset.string();
    j["schema"] = spec.schema.string();
  }
  ordered_json methods = ordered_json::array();
  for (const auto m : spec.methods) methods.push_back(MethodName(m));
  j["methods"] = std::move(methods);
  j["runs"] = spec.runs;
  j["train"] = {{"learning_rate", spec.train.learning_rate},
                {"batch_size", spec.train.batch_size},
                {"epochs", spec.train.epochs},
                {"tau", spec.train.tau},
                {"dimension", spec.features.dimension}};
  if (spec.eval) {
    j["eval"] = {{"gw", spec.eval->group_weights},
                 {"cw", spec.eval->class_weights},
                 {"pg", spec.eval->p_group},
                 {"pc", spec.eval->p_class}};
  } else {
    j["eval"] = "equal";
  }
  j["sweep"] = {{"n_configs", spec.sweep.n_configs},
                {"alpha", spec.sweep.alpha},
                {"resamples", spec.sweep.resamples},
                {"ci_resamples", spec.sweep.ci_resamples}};
  j["tau_grid"] = spec.tau_grid;
  j["seed"] = spec.seed;
  return j;
}

// Identifies the training inputs so stale runs are not reused.
std::string TrainingFingerprint(const ExperimentSpec& spec) {
  auto j = SpecToJson(spec);
  j.erase("sweep");
  j.erase("tau_grid");
  j.erase("eval");
  return fmt::format("{:016x}", StableHash(j.dump()));
}

fs::path RunPath(const ExperimentSpec& spec, Method m, std::uint64_t seed) {
  return spec.out / "runs" / fmt::format("{}_seed{}.json", MethodName(m), seed);
}

void MaterialiseDataset(const ExperimentSpec& spec, const Dataset& dataset) {
  std::ostringstream data;
  WriteDataset(dataset, data);
  WriteFileAtomic(spec.out / "dataset.jsonl", data.str());
  std::ostringstream schema;
  WriteSchema(dataset.schema, schema);
  WriteFileAtomic(spec.out / "schema.json", schema.str());
  if (spec.synth) {
    WriteFileAtomic(spec.out / "synth.json",
                    SynthConfigToJson(*spec.synth) + "\n");
  }
  WriteFileAtomic(spec.out / "spec.json", SpecToJson(spec).dump(2) + "\n");
}

std::string FormatP(const std::optional<double>& p) {
  return p ? fmt::format("{}", *p) : std::string();
}

std::string Marker(const std::optional<double>& p, double alpha) {
  return p && *p < alpha ? "*" : "";
}

void WriteReport(const ExperimentSpec& spec, const RunReport& report) {
  std::string csv =
      "method,runs,perf_mean,perf_sd,fair_mean,fair_sd,perf_p_value,"
      "fair_p_value,perf_sig,fair_sig\n";
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", MethodName(r.method),
                       r.runs, r.perf_mean, r.perf_sd, r.fair_mean, r.fair_sd,
                       FormatP(r.perf_p), FormatP(r.fair_p),
                       Marker(r.perf_p, report.alpha),
                       Marker(r.fair_p, report.alpha));
    ordered_json row;
    row["method"] = MethodName(r.method);
    row["runs"] = r.runs;
    row["perf_mean"] = r.perf_mean;
    row["perf_sd"] = r.perf_sd;
    row["fair_mean"] = r.fair_mean;
    row["fair_sd"] = r.fair_sd;
    row["perf_p_value"] = r.perf_p ? ordered_json(*r.perf_p) : ordered_json();
    row["fair_p_value"] = r.fair_p ? ordered_json(*r.fair_p) : ordered_json();
    row["perf_significant"] = r.perf_p && *r.perf_p < report.alpha;
    row["fair_significant"] = r.fair_p && *r.fair_p < report.alpha;
    rows.push_back(std::move(row));
  }
  ordered_json j;
  j["baseline"] = "MV";
  j["alpha"] = report.alpha;
  j["resamples"] = spec.sweep.resamples;
  j["rows"] = std::move(rows);
  WriteFileAtomic(spec.out / "report.csv", csv);
  WriteFileAtomic(spec.out / "report.json", j.dump(2) + "\n");
}

AggregationConfig ParseAggregationConfig(const nlohmann::json& j) {
  AggregationConfig cfg;
  cfg.group_weights = j.at("gw").get<std::vector<double>>();
  cfg.class_weights = j.at("cw").get<std::vector<double>>();
  cfg.p_group = j.value("pg", 1.0);
  cfg.p_class = j.value("pc", 1.0);
  cfg.Validate();
  return cfg;
}

}  // namespace

void WriteFileAtomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void ExperimentSpec::Validate() const {
  if (!synth && (dataset.empty() || schema.empty())) {
    throw InvalidArgument("spec needs a dataset and schema or a synth config");
  }
  if (synth) {
    synth->Validate();
  } else {
    if (!fs::exists(dataset)) {
      throw InvalidArgument("dataset file not found: " + dataset.string());
    }
    if (!fs::exists(schema)) {
      throw InvalidArgument("schema file not found: " + schema.string());
    }
  }
  if (methods.empty()) throw InvalidArgument("spec lists no methods");
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
  train.Validate();
  if (features.dimension == 0) throw InvalidArgument("dimension must be > 0");
  if (eval) eval->Validate();
  if (!(sweep.alpha > 0.0 && sweep.alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
  if (sweep.n_configs < 1) throw InvalidArgument("n_configs must be >= 1");
  if (sweep.resamples < kMinResamples) {
    throw InvalidArgument("resamples must be >= 100");
  }
  if (sweep.ci_resamples < 1) throw InvalidArgument("ci_resamples must be >= 1");
  for (const double tau : tau_grid) {
    if (!(tau > 0.0)) throw InvalidArgument("tau grid values must be > 0");
  }
  if (workers < 1) throw InvalidArgument("workers must be >= 1");
}

AggregationConfig ExperimentSpec::EvalConfig(const TaskSchema& schema) const {
  if (!eval) {
    return AggregationConfig::Equal(schema.num_groups(), schema.num_classes());
  }
  if (eval->group_weights.size() != schema.num_groups() ||
      eval->class_weights.size() != schema.num_classes()) {
    throw InvalidArgument("evaluation weights do not match the schema");
  }
  return *eval;
}

ExperimentSpec ParseExperimentSpec(std::string_view json_text,
                                   const fs::path& base_dir) {
  ExperimentSpec spec;
  try {
    const auto j = nlohmann::json::parse(json_text);
    const auto resolve = [&base_dir](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? path : base_dir / path;
    };
    if (j.contains("dataset")) {
      spec.dataset = resolve(j["dataset"].get<std::string>());
    }
    if (j.contains("schema")) {
      spec.schema = resolve(j["schema"].get<std::string>());
    }
    if (j.contains("synth")) {
      spec.synth = SynthConfigFromJson(j["synth"].dump());
    }
    if (j.contains("methods")) {
      spec.methods.clear();
      for (const auto& m : j["methods"]) {
        spec.methods.push_back(ParseMethod(m.get<std::string>()));
      }
    }
    spec.runs = j.value("runs", spec.runs);
    if (j.contains("train")) {
      const auto& t = j["train"];
      spec.train.learning_rate =
          t.value("learning_rate", spec.train.learning_rate);
      spec.train.batch_size = t.value("batch_size", spec.train.batch_size);
      spec.train.epochs = t.value("epochs", spec.train.epochs);
      spec.train.tau = t.value("tau", spec.train.tau);
      spec.features.dimension = t.value("dimension", spec.features.dimension);
    }
    if (j.contains("eval") && !(j["eval"].is_string() &&
                                j["eval"].get<std::string>() == "equal")) {
      spec.eval = ParseAggregationConfig(j["eval"]);
    }
    if (j.contains("sweep")) {
      const auto& s = j["sweep"];
      spec.sweep.n_configs = s.value("n_configs", spec.sweep.n_configs);
      spec.sweep.alpha = s.value("alpha", spec.sweep.alpha);
      spec.sweep.resamples = s.value("resamples", spec.sweep.resamples);
      spec.sweep.ci_resamples =
          s.value("ci_resamples", spec.sweep.ci_resamples);
    }
    if (j.contains("tau_grid")) {
      spec.tau_grid = j["tau_grid"].get<std::vector<double>>();
    }
    if (j.contains("out")) spec.out = resolve(j["out"].get<std::string>());
    spec.seed = j.value("seed", spec.seed);
    spec.workers = j.value("workers", spec.workers);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid experiment spec: ") + e.what());
  }
  return spec;
}

ExperimentSpec LoadExperimentSpec(const fs::path& path) {
  return ParseExperimentSpec(ReadFile(path), path.parent_path());
}

Dataset LoadExperimentDataset(const ExperimentSpec& spec) {
  if (spec.synth) return Generate(*spec.synth);
  return LoadDataset(spec.dataset, LoadSchema(spec.schema));
}

DatasetSummary SummarizeDataset(const Dataset& dataset) {
  ValidateDataset(dataset);
  DatasetSummary summary;
  const auto& schema = dataset.schema;
  summary.groups.resize(schema.num_groups());
  for (std::size_t g = 0; g < schema.num_groups(); ++g) {
    summary.groups[g].group = schema.groups[g];
  }
  for (const auto& inst : dataset.instances) {
    const auto s = static_cast<std::size_t>(inst.split);
    ++summary.instances[s];
    summary.annotations += inst.annotations.size();
    for (std::size_t g = 0; g < schema.num_groups(); ++g) {
      auto& sizes = summary.groups[g];
      switch (inst.membership[g]) {
        case Membership::kIn:
          ++sizes.in[s];
          break;
        case Membership::kOut:
          ++sizes.out[s];
          break;
        case Membership::kUnknown:
          ++sizes.unknown[s];
          break;
      }
    }
  }
  const std::size_t total = dataset.instances.size();
  for (const auto& sizes : summary.groups) {
    const std::size_t unknown =
        sizes.unknown[0] + sizes.unknown[1] + sizes.unknown[2];
    if (total > 0 && unknown == total) {
      summary.warnings.push_back("group " + sizes.group +
                                 " has unknown membership on every instance");
    }
    for (const auto split : kSplits) {
      const auto s = static_cast<std::size_t>(split);
      if (summary.instances[s] > 0 && (sizes.in[s] == 0 || sizes.out[s] == 0)) {
        summary.warnings.push_back(
            fmt::format("group {} has an empty in- or out-subset on the {} "
                        "split; its fairness cells will be flagged",
                        sizes.group, SplitName(split)));
      }
    }
  }
  try {
    summary.alpha = KrippendorffAlpha(
        dataset, schema.task == TaskKind::kSingleLabel
                     ? AgreementDistance::kNominal
                     : AgreementDistance::kMasi);
  } catch (const InvalidArgument& e) {
    summary.warnings.push_back(std::string("agreement not computed: ") +
                               e.what());
  }
  return summary;
}

std::string FormatDatasetSummary(const DatasetSummary& s) {
  std::string out;
  const std::size_t total = s.instances[0] + s.instances[1] + s.instances[2];
  out += fmt::format("instances: {} (train {}, dev {}, test {})\n", total,
                     s.instances[0], s.instances[1], s.instances[2]);
  out += fmt::format("annotations: {} ({:.2f} per instance)\n", s.annotations,
                     total ? static_cast<double>(s.annotations) / total : 0.0);
  out += s.alpha ? fmt::format("krippendorff alpha: {:.4f}\n", *s.alpha)
                 : std::string("krippendorff alpha: undefined\n");
  out += fmt::format("{:<16} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
                     "group", "train_in", "train_out", "dev_in", "dev_out",
                     "test_in", "test_out", "unknown");
  for (const auto& g : s.groups) {
    out += fmt::format("{:<16} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}\n",
                       g.group, g.in[0], g.out[0], g.in[1], g.out[1], g.in[2],
                       g.out[2], g.unknown[0] + g.unknown[1] + g.unknown[2]);
  }
  for (const auto& w : s.warnings) out += "warning: " + w + "\n";
  return out;
}

RunReport CmdRun(const ExperimentSpec& spec) {
  spec.Validate();
  const Dataset dataset = LoadExperimentDataset(spec);
  const AggregationConfig eval_cfg = spec.EvalConfig(dataset.schema);
  fs::create_directories(spec.out / "runs");
  MaterialiseDataset(spec, dataset);

  struct Job {
    Method method;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto m : spec.methods) {
    for (std::size_t r = 0; r < spec.runs; ++r) {
      jobs.push_back({m, spec.seed + r});
    }
  }
  std::vector<std::optional<RunRecord>> records(jobs.size());
  std::vector<std::string> errors(jobs.size());
  internal::ParallelFor(jobs.size(), spec.workers, [&](std::size_t i) {
    TrainConfig cfg = spec.train;
    cfg.method = jobs[i].method;
    cfg.seed = jobs[i].seed;
    try {
      records[i] = Train(dataset, cfg, spec.features);
      WriteFileAtomic(RunPath(spec, cfg.method, cfg.seed),
                      RunRecordToJson(*records[i]) + "\n");
    } catch (const Error& e) {
      errors[i] = e.what();
      records[i].reset();
    }
  });

  ordered_json manifest;
  manifest["fingerprint"] = TrainingFingerprint(spec);
  ordered_json completed = ordered_json::array();
  ordered_json failed = ordered_json::array();
  std::string first_error;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    ordered_json entry;
    entry["method"] = MethodName(jobs[i].method);
    entry["seed"] = jobs[i].seed;
    if (records[i]) {
      entry["file"] = RunPath(spec, jobs[i].method, jobs[i].seed)
                          .lexically_relative(spec.out)
                          .generic_string();
      completed.push_back(std::move(entry));
    } else {
      entry["error"] = errors[i];
      failed.push_back(std::move(entry));
      if (first_error.empty()) {
        first_error = fmt::format("{} seed {}: {}", MethodName(jobs[i].method),
                                  jobs[i].seed, errors[i]);
      }
    }
  }
  manifest["status"] = failed.empty() ? "complete" : "partial";
  manifest["completed"] = std::move(completed);
  manifest["failed"] = std::move(failed);
  WriteFileAtomic(spec.out / "manifest.json", manifest.dump(2) + "\n");
  if (!first_error.empty()) throw TrainingError(first_error);

  const LabelMatrix truth = SoftLabels(dataset, Split::kTest, 1.0);
  const MembershipTable membership(dataset, Split::kTest);
  const Statistic perf_stat = [&truth](const LabelMatrix& q,
                                       std::span<const std::size_t> rows) {
    return SoftMicroF1(truth, q, rows);
  };
  const Statistic fair_stat = [&](const LabelMatrix& q,
                                  std::span<const std::size_t> rows) {
    return Aggregate(ComputeFairnessMatrix(truth, q, membership, rows),
                     eval_cfg);
  };

  std::vector<MethodScores> scores;
  RunReport report;
  report.alpha = spec.sweep.alpha;
  for (const auto m : spec.methods) {
    MethodScores ms;
    ms.method = std::string(MethodName(m));
    std::vector<double> perf, fair;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].method != m) continue;
      const auto& q = records[i]->test.q;
      const auto e = EvaluateTest(dataset, q, eval_cfg);
      perf.push_back(e.perf);
      fair.push_back(e.fairness);
      ms.ids = records[i]->test.ids;
      ms.runs.push_back(q);
    }
    ReportRow row;
    row.method = m;
    row.runs = perf.size();
    row.perf_mean = Mean(perf);
    row.perf_sd = StdDev(perf);
    row.fair_mean = Mean(fair);
    row.fair_sd = StdDev(fair);
    report.rows.push_back(row);
    scores.push_back(std::move(ms));
  }

  const auto mv = std::find(spec.methods.begin(), spec.methods.end(),
                            Method::kMV);
  if (mv != spec.methods.end()) {
    const auto& baseline = scores[mv - spec.methods.begin()];
    const std::uint64_t seed = DeriveSeed(spec.seed, "report.bootstrap");
    const ResamplePlan plan(baseline.num_rows(), spec.sweep.resamples, seed);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      if (report.rows[i].method != Method::kMV) others.push_back(i);
    }
    internal::ParallelFor(others.size(), spec.workers, [&](std::size_t j) {
      const std::size_t i = others[j];
      report.rows[i].perf_p =
          PairedBootstrapTest(scores[i], baseline, perf_stat, plan).p_value;
      report.rows[i].fair_p =
          PairedBootstrapTest(scores[i], baseline, fair_stat, plan).p_value;
    });
  }
  WriteReport(spec, report);
  return report;
}

std::optional<std::vector<MethodScores>> LoadRunScores(
    const ExperimentSpec& spec) {
  const fs::path manifest_path = spec.out / "manifest.json";
  if (!fs::exists(manifest_path)) return std::nullopt;
  const auto manifest = nlohmann::json::parse(ReadFile(manifest_path));
  if (manifest.value("status", "") != "complete" ||
      manifest.value("fingerprint", "") != TrainingFingerprint(spec)) {
    return std::nullopt;
  }
  std::vector<MethodScores> scores;
  for (const auto m : spec.methods) {
    MethodScores ms;
    ms.method = std::string(MethodName(m));
    for (std::size_t r = 0; r < spec.runs; ++r) {
      const fs::path path = RunPath(spec, m, spec.seed + r);
      if (!fs::exists(path)) return std::nullopt;
      auto record = LoadRunRecord(path);
      ms.ids = record.test.ids;
      ms.runs.push_back(std::move(record.test.q));
    }
    scores.push_back(std::move(ms));
  }
  return scores;
}

std::vector<MethodSweep> CmdSweep(const ExperimentSpec& spec) {
  spec.Validate();
  const auto mv = std::find(spec.methods.begin(), spec.methods.end(),
                            Method::kMV);
  if (mv == spec.methods.end()) {
    throw InvalidArgument("the sweep compares against MV; add it to methods");
  }
  auto scores = LoadRunScores(spec);
  if (!scores) {
    CmdRun(spec);
    scores = LoadRunScores(spec);
    if (!scores) throw Error("runs missing after training");
  }
  const Dataset dataset = LoadExperimentDataset(spec);
  const auto configs =
      SampleConfigs(spec.sweep.n_configs, dataset.schema.num_groups(),
                    dataset.schema.num_classes(),
                    DeriveSeed(spec.seed, "sweep.configs"));
  {
    std::ostringstream out;
    WriteConfigs(configs, out);
    WriteFileAtomic(spec.out / "configs.jsonl", out.str());
  }

  SweepOptions options;
  options.alpha = spec.sweep.alpha;
  options.resamples = spec.sweep.resamples;
  options.seed = DeriveSeed(spec.seed, "sweep.bootstrap");
  options.workers = spec.workers;
  const auto& baseline = (*scores)[mv - spec.methods.begin()];

  std::vector<MethodSweep> sweeps;
  for (std::size_t i = 0; i < spec.methods.size(); ++i) {
    if (spec.methods[i] == Method::kMV) continue;
    MethodSweep sweep;
    sweep.method = spec.methods[i];
    sweep.verdicts =
        ConfigSweep(baseline, (*scores)[i], dataset, configs, options);
    const std::uint64_t ci_seed =
        DeriveSeed(spec.seed, "sweep.ci", static_cast<std::uint64_t>(i));
    for (const auto by :
         {BucketBy::kOverall, BucketBy::kPGroupLevel, BucketBy::kPClassLevel}) {
      auto rows = FractionSummary(sweep.verdicts, configs, by,
                                  spec.sweep.ci_resamples, ci_seed);
      sweep.summary.insert(sweep.summary.end(), rows.begin(), rows.end());
    }
    const std::string name(MethodName(sweep.method));
    std::ostringstream verdict_csv;
    WriteSweepCsv(sweep.verdicts, configs, verdict_csv);
    WriteFileAtomic(spec.out / ("sweep_" + name + ".csv"), verdict_csv.str());
    std::ostringstream summary_csv;
    WriteSummaryCsv(sweep.summary, summary_csv);
    WriteFileAtomic(spec.out / ("summary_" + name + ".csv"),
                    summary_csv.str());
    sweeps.push_back(std::move(sweep));
  }
  return sweeps;
}

TemperatureReport CmdTempSweep(const ExperimentSpec& spec) {
  spec.Validate();
  if (std::find(spec.methods.begin(), spec.methods.end(), Method::kSL) ==
      spec.methods.end()) {
    throw InvalidArgument("temperature sweeps need SL among the methods");
  }
  if (spec.tau_grid.empty()) throw InvalidArgument("empty temperature grid");
  const Dataset dataset = LoadExperimentDataset(spec);
  const AggregationConfig eval_cfg = spec.EvalConfig(dataset.schema);

  TemperatureReport report;
  for (std::size_t r = 0; r < spec.runs; ++r) {
    report.seeds.push_back(spec.seed + r);
  }
  report.per_seed.resize(spec.runs);
  internal::ParallelFor(spec.runs, spec.workers, [&](std::size_t r) {
    TrainConfig cfg = spec.train;
    cfg.method = Method::kSL;
    cfg.seed = report.seeds[r];
    report.per_seed[r] = TemperatureSweep(dataset, cfg, spec.tau_grid,
                                          eval_cfg, spec.features);
  });

  std::string runs_csv = "seed,tau,perf,fairness\n";
  for (std::size_t r = 0; r < spec.runs; ++r) {
    for (const auto& row : report.per_seed[r]) {
      runs_csv += fmt::format("{},{},{},{}\n", report.seeds[r], row.tau,
                              row.perf, row.fairness);
    }
  }
  std::string summary_csv = "tau,n,perf_mean,perf_sd,fair_mean,fair_sd\n";
  for (std::size_t t = 0; t < spec.tau_grid.size(); ++t) {
    std::vector<double> perf, fair;
    for (const auto& rows : report.per_seed) {
      perf.push_back(rows[t].perf);
      fair.push_back(rows[t].fairness);
    }
    TemperatureSummaryRow row{spec.tau_grid[t], perf.size(), Mean(perf),
                              StdDev(perf),     Mean(fair),  StdDev(fair)};
    summary_csv += fmt::format("{},{},{},{},{},{}\n", row.tau, row.n,
                               row.perf_mean, row.perf_sd, row.fair_mean,
                               row.fair_sd);
    report.summary.push_back(row);
  }
  WriteFileAtomic(spec.out / "temp_sweep_runs.csv", runs_csv);
  WriteFileAtomic(spec.out / "temp_sweep.csv", summary_csv);
  return report;
}

}  // namespace hlvfair
