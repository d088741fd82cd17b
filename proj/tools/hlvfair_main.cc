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

// hlvfair: validate, synth, run, sweep and temp-sweep subcommands.
//
// Exit codes: 0 success, 1 validation failure, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "hlvfair/annotations.h"
#include "hlvfair/error.h"
#include "hlvfair/experiment.h"
#include "hlvfair/synth.h"

namespace {

namespace fs = std::filesystem;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Flags {
  std::string dataset;
  std::string schema;
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> n_configs;
  std::optional<double> alpha;
  std::optional<std::size_t> resamples;
  std::vector<double> tau_grid;
  // synth only
  std::optional<std::size_t> n_instances;
  std::optional<double> rho;
};

void AddExperimentFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--dataset", f.dataset, "JSONL dataset");
  cmd->add_option("--schema", f.schema, "schema JSON");
  cmd->add_option("--spec", f.spec, "experiment spec JSON");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--workers", f.workers, "worker threads");
  cmd->add_option("--n-configs", f.n_configs, "sampled configurations");
  cmd->add_option("--alpha", f.alpha, "significance level");
  cmd->add_option("--resamples", f.resamples, "bootstrap resamples");
  cmd->add_option("--tau-grid", f.tau_grid, "temperatures, comma separated")
      ->delimiter(',');
}

hlvfair::ExperimentSpec BuildSpec(const Flags& f) {
  hlvfair::ExperimentSpec spec;
  if (!f.spec.empty()) spec = hlvfair::LoadExperimentSpec(f.spec);
  if (!f.dataset.empty()) {
    spec.dataset = f.dataset;
    spec.synth.reset();
  }
  if (!f.schema.empty()) spec.schema = f.schema;
  if (!f.out.empty()) spec.out = f.out;
  if (f.seed) spec.seed = *f.seed;
  if (f.workers) spec.workers = *f.workers;
  if (f.n_configs) spec.sweep.n_configs = *f.n_configs;
  if (f.alpha) spec.sweep.alpha = *f.alpha;
  if (f.resamples) spec.sweep.resamples = *f.resamples;
  if (!f.tau_grid.empty()) spec.tau_grid = f.tau_grid;
  if (f.spec.empty() && f.dataset.empty()) spec.synth = hlvfair::SynthConfig{};
  spec.Validate();
  return spec;
}

int Validate(const Flags& f) {
  if (f.dataset.empty() || f.schema.empty()) {
    std::cerr << "validate needs --dataset and --schema\n";
    return kExitValidation;
  }
  const auto schema = hlvfair::LoadSchema(f.schema);
  const auto dataset = hlvfair::LoadDataset(f.dataset, schema);
  std::cout << hlvfair::FormatDatasetSummary(
      hlvfair::SummarizeDataset(dataset));
  return 0;
}

int Synth(const Flags& f) {
  hlvfair::SynthConfig cfg;
  if (!f.spec.empty()) {
    std::ifstream in(f.spec);
    if (!in) throw hlvfair::InvalidArgument("cannot read " + f.spec);
    std::stringstream buffer;
    buffer << in.rdbuf();
    cfg = hlvfair::SynthConfigFromJson(buffer.str());
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.n_instances) cfg.n_instances = *f.n_instances;
  if (f.rho) cfg.group_correlation = *f.rho;
  const fs::path out = f.out.empty() ? fs::path("synth") : fs::path(f.out);
  const auto dataset = hlvfair::Generate(cfg);
  std::ostringstream data, schema;
  hlvfair::WriteDataset(dataset, data);
  hlvfair::WriteSchema(dataset.schema, schema);
  hlvfair::WriteFileAtomic(out / "dataset.jsonl", data.str());
  hlvfair::WriteFileAtomic(out / "schema.json", schema.str());
  hlvfair::WriteFileAtomic(out / "synth.json",
                           hlvfair::SynthConfigToJson(cfg) + "\n");
  std::cout << fmt::format("wrote {} instances to {}\n",
                           dataset.instances.size(), out.string());
  return 0;
}

int Run(const Flags& f) {
  const auto spec = BuildSpec(f);
  const auto report = hlvfair::CmdRun(spec);
  std::cout << fmt::format("{:<6} {:>10} {:>10} {:>10} {:>10}\n", "method",
                           "perf", "perf_p", "fair", "fair_p");
  for (const auto& r : report.rows) {
    const auto p = [&](const std::optional<double>& v) {
      return v ? fmt::format("{:.4f}{}", *v, *v < report.alpha ? "*" : "")
               : std::string("-");
    };
    std::cout << fmt::format("{:<6} {:>10.4f} {:>10} {:>10.4f} {:>10}\n",
                             hlvfair::MethodName(r.method), r.perf_mean,
                             p(r.perf_p), r.fair_mean, p(r.fair_p));
  }
  std::cout << "report written to " << (spec.out / "report.csv").string()
            << "\n";
  return 0;
}

int Sweep(const Flags& f) {
  const auto spec = BuildSpec(f);
  for (const auto& sweep : hlvfair::CmdSweep(spec)) {
    std::cout << hlvfair::MethodName(sweep.method) << " vs MV\n";
    for (const auto& row : sweep.summary) {
      std::cout << fmt::format(
          "  {:<14} n={:<6} not_mv_fairer={}\n", row.bucket, row.n,
          row.frac_not_baseline_fairer
              ? fmt::format("{:.3f} [{:.3f}, {:.3f}]",
                            *row.frac_not_baseline_fairer, *row.ci_low,
                            *row.ci_high)
              : std::string("NA"));
    }
  }
  return 0;
}

int TempSweep(const Flags& f) {
  const auto spec = BuildSpec(f);
  const auto report = hlvfair::CmdTempSweep(spec);
  std::cout << fmt::format("{:>8} {:>16} {:>16}\n", "tau", "perf", "fairness");
  for (const auto& row : report.summary) {
    std::cout << fmt::format("{:>8} {:>8.4f}±{:<7.4f} {:>8.4f}±{:<7.4f}\n",
                             row.tau, row.perf_mean, row.perf_sd,
                             row.fair_mean, row.fair_sd);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human label variation and fairness toolkit"};
  app.require_subcommand(1);
  Flags flags;

  auto* validate = app.add_subcommand("validate", "check a dataset");
  validate->add_option("--dataset", flags.dataset, "JSONL dataset")->required();
  validate->add_option("--schema", flags.schema, "schema JSON")->required();

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--spec", flags.spec, "synth config JSON");
  synth->add_option("--out", flags.out, "output directory");
  synth->add_option("--seed", flags.seed, "generator seed");
  synth->add_option("--n-instances", flags.n_instances, "instance count");
  synth->add_option("--rho", flags.rho, "rare-class/group correlation");

  auto* run = app.add_subcommand("run", "train methods and report Perf/Fair");
  AddExperimentFlags(run, flags);
  auto* sweep = app.add_subcommand("sweep", "sampled-configuration sweep");
  AddExperimentFlags(sweep, flags);
  auto* temp = app.add_subcommand("temp-sweep", "SL temperature sweep");
  AddExperimentFlags(temp, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*validate) return Validate(flags);
    if (*synth) return Synth(flags);
    if (*run) return Run(flags);
    if (*sweep) return Sweep(flags);
    if (*temp) return TempSweep(flags);
  } catch (const hlvfair::DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const hlvfair::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
