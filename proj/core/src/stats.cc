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

#include "hlvfair/stats.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "hlvfair/error.h"
#include "hlvfair/metrics.h"
#include "hlvfair/random.h"
#include "parallel.h"

namespace hlvfair {
namespace {

void CheckPaired(const MethodScores& a, const MethodScores& b) {
  a.Validate();
  b.Validate();
  if (a.num_rows() != b.num_rows() ||
      a.runs[0].cols() != b.runs[0].cols()) {
    throw InvalidArgument("methods " + a.method + " and " + b.method +
                          " were evaluated on different instance sets");
  }
  if (!a.ids.empty() && !b.ids.empty() && a.ids != b.ids) {
    throw InvalidArgument("methods " + a.method + " and " + b.method +
                          " were evaluated on different instance sets");
  }
}

double MeanOverRuns(const MethodScores& m, const Statistic& statistic,
                    std::span<const std::size_t> rows) {
  double total = 0.0;
  for (const auto& q : m.runs) total += statistic(q, rows);
  return total / static_cast<double>(m.runs.size());
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string("NA");
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

// Class-major fairness scores of every run over `rows`.
std::vector<double> RunScores(const MethodScores& m, const LabelMatrix& truth,
                              const MembershipTable& membership,
                              std::span<const std::size_t> rows) {
  std::vector<double> out;
  for (const auto& q : m.runs) {
    const auto fm = ComputeFairnessMatrix(truth, q, membership, rows);
    out.insert(out.end(), fm.s.begin(), fm.s.end());
  }
  return out;
}

double MeanAggregate(std::span<const double> scores, std::size_t runs,
                     std::size_t num_classes, std::size_t num_groups,
                     const AggregationConfig& cfg) {
  const std::size_t cells = num_classes * num_groups;
  double total = 0.0;
  for (std::size_t r = 0; r < runs; ++r) {
    total += AggregateScores(scores.subspan(r * cells, cells), num_classes,
                             num_groups, cfg);
  }
  return total / static_cast<double>(runs);
}

}  // namespace

void MethodScores::Validate() const {
  if (runs.empty()) {
    throw InvalidArgument("method " + method + " has no runs");
  }
  for (const auto& q : runs) {
    if (q.rows() != runs[0].rows() || q.cols() != runs[0].cols() ||
        q.semantics() != runs[0].semantics()) {
      throw InvalidArgument("runs of method " + method +
                            " differ in shape");
    }
  }
  if (!ids.empty() && ids.size() != runs[0].rows()) {
    throw InvalidArgument("method " + method +
                          ": id list does not match the prediction rows");
  }
}

ResamplePlan::ResamplePlan(std::size_t n, std::size_t count,
                           std::uint64_t seed)
    : n_(n), count_(count), rows_(n * count) {
  if (n == 0) throw InvalidArgument("cannot resample an empty test set");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (auto& r : rows_) r = pick(rng);
}

double TwoTailedPValue(double observed, std::span<const double> resampled) {
  if (resampled.empty()) throw InvalidArgument("no bootstrap replicates");
  std::size_t upper = 0;
  std::size_t lower = 0;
  for (const double d : resampled) {
    const double centred = d - observed;
    upper += centred >= observed;
    lower += centred <= observed;
  }
  const double p = 2.0 * static_cast<double>(std::min(upper, lower)) /
                   static_cast<double>(resampled.size());
  return std::clamp(p, 0.0, 1.0);
}

BootstrapResult PairedBootstrapTest(const MethodScores& a,
                                    const MethodScores& b,
                                    const Statistic& statistic,
                                    const ResamplePlan& plan) {
  CheckPaired(a, b);
  if (plan.num_rows() != a.num_rows()) {
    throw InvalidArgument("resample plan does not match the test set size");
  }
  if (plan.size() < kMinResamples) {
    throw InvalidArgument("at least 100 bootstrap resamples are required");
  }
  std::vector<std::size_t> all(a.num_rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  BootstrapResult result;
  result.observed_difference =
      MeanOverRuns(a, statistic, all) - MeanOverRuns(b, statistic, all);
  std::vector<double> replicates(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto rows = plan.resample(i);
    replicates[i] =
        MeanOverRuns(a, statistic, rows) - MeanOverRuns(b, statistic, rows);
  }
  result.p_value = TwoTailedPValue(result.observed_difference, replicates);
  return result;
}

BootstrapResult PairedBootstrapTest(const MethodScores& a,
                                    const MethodScores& b,
                                    const Statistic& statistic,
                                    std::size_t resamples,
                                    std::uint64_t seed) {
  CheckPaired(a, b);
  if (resamples < kMinResamples) {
    throw InvalidArgument("at least 100 bootstrap resamples are required");
  }
  return PairedBootstrapTest(a, b, statistic,
                             ResamplePlan(a.num_rows(), resamples, seed));
}

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kBaselineFairer:
      return "baseline_fairer";
    case Verdict::kHlvFairer:
      return "hlv_fairer";
    case Verdict::kNoSignificantDifference:
      return "no_significant_difference";
  }
  return "no_significant_difference";
}

Verdict ParseVerdict(std::string_view name) {
  for (const auto v : {Verdict::kBaselineFairer, Verdict::kHlvFairer,
                       Verdict::kNoSignificantDifference}) {
    if (VerdictName(v) == name) return v;
  }
  throw InvalidArgument("unknown verdict: " + std::string(name));
}

std::vector<SweepVerdict> ConfigSweep(
    const MethodScores& baseline, const MethodScores& hlv,
    const Dataset& dataset, const std::vector<AggregationConfig>& configs,
    const SweepOptions& options) {
  CheckPaired(hlv, baseline);
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw InvalidArgument("alpha must lie in (0, 1)");
  }
  if (options.resamples < kMinResamples) {
    throw InvalidArgument("at least 100 bootstrap resamples are required");
  }
  const LabelMatrix truth = SoftLabels(dataset, Split::kTest, 1.0);
  const MembershipTable membership(dataset, Split::kTest);
  if (truth.rows() != hlv.num_rows() || truth.cols() != hlv.runs[0].cols()) {
    throw InvalidArgument("predictions do not cover the test split");
  }
  for (const auto& cfg : configs) cfg.Validate();

  const std::size_t num_classes = truth.cols();
  const std::size_t num_groups = membership.groups();
  const ResamplePlan plan(truth.rows(), options.resamples, options.seed);

  // The fairness matrices do not depend on the configuration: compute them
  // once per resample and re-aggregate for every configuration.
  std::vector<std::size_t> all(truth.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto observed_hlv = RunScores(hlv, truth, membership, all);
  const auto observed_base = RunScores(baseline, truth, membership, all);
  std::vector<std::vector<double>> resampled_hlv(plan.size());
  std::vector<std::vector<double>> resampled_base(plan.size());
  internal::ParallelFor(plan.size(), options.workers, [&](std::size_t b) {
    resampled_hlv[b] = RunScores(hlv, truth, membership, plan.resample(b));
    resampled_base[b] =
        RunScores(baseline, truth, membership, plan.resample(b));
  });

  std::vector<SweepVerdict> verdicts(configs.size());
  internal::ParallelFor(configs.size(), options.workers, [&](std::size_t c) {
    const auto& cfg = configs[c];
    const auto mean = [&](const std::vector<double>& scores,
                          std::size_t runs) {
      return MeanAggregate(scores, runs, num_classes, num_groups, cfg);
    };
    SweepVerdict v;
    v.config_index = c;
    v.observed_difference = mean(observed_hlv, hlv.runs.size()) -
                            mean(observed_base, baseline.runs.size());
    std::vector<double> replicates(plan.size());
    for (std::size_t b = 0; b < plan.size(); ++b) {
      replicates[b] = mean(resampled_hlv[b], hlv.runs.size()) -
                      mean(resampled_base[b], baseline.runs.size());
    }
    v.p_value = TwoTailedPValue(v.observed_difference, replicates);
    if (v.p_value >= options.alpha) {
      v.verdict = Verdict::kNoSignificantDifference;
    } else {
      v.verdict = v.observed_difference > 0.0 ? Verdict::kHlvFairer
                                              : Verdict::kBaselineFairer;
    }
    verdicts[c] = v;
  });
  return verdicts;
}

std::vector<FractionRow> FractionSummary(
    const std::vector<SweepVerdict>& verdicts,
    const std::vector<AggregationConfig>& configs, BucketBy by,
    std::size_t ci_resamples, std::uint64_t seed) {
  if (verdicts.size() != configs.size()) {
    throw InvalidArgument("verdicts and configurations are not aligned");
  }
  if (ci_resamples == 0) throw InvalidArgument("ci_resamples must be >= 1");

  struct Bucket {
    std::string name;
    std::vector<std::size_t> members;
  };
  std::vector<Bucket> buckets;
  if (by == BucketBy::kOverall) {
    buckets.push_back({"overall", {}});
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      buckets[0].members.push_back(i);
    }
  } else {
    const char* prefix = by == BucketBy::kPGroupLevel ? "p_group" : "p_class";
    for (const auto level : {PLevel::kLow, PLevel::kMid, PLevel::kHigh}) {
      buckets.push_back(
          {fmt::format("{}:{}", prefix, PLevelName(level)), {}});
    }
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      const auto& cfg = configs[verdicts[i].config_index];
      const double p =
          by == BucketBy::kPGroupLevel ? cfg.p_group : cfg.p_class;
      buckets[static_cast<std::size_t>(PLevelOf(p))].members.push_back(i);
    }
  }

  std::vector<FractionRow> rows;
  for (std::size_t bi = 0; bi < buckets.size(); ++bi) {
    const auto& bucket = buckets[bi];
    FractionRow row;
    row.bucket = bucket.name;
    row.n = bucket.members.size();
    if (row.n == 0) {
      rows.push_back(row);
      continue;
    }
    // Integer tallies keep the fractions independent of evaluation order.
    std::vector<std::uint8_t> not_baseline(row.n);
    std::size_t count_not = 0;
    std::size_t count_hlv = 0;
    for (std::size_t j = 0; j < row.n; ++j) {
      const Verdict v = verdicts[bucket.members[j]].verdict;
      not_baseline[j] = v != Verdict::kBaselineFairer;
      count_not += not_baseline[j];
      count_hlv += v == Verdict::kHlvFairer;
    }
    const double n = static_cast<double>(row.n);
    row.frac_not_baseline_fairer = count_not / n;
    row.frac_hlv_fairer = count_hlv / n;

    Rng rng(DeriveSeed(seed, "fraction_summary." + bucket.name, bi));
    std::uniform_int_distribution<std::size_t> pick(0, row.n - 1);
    std::vector<double> replicates(ci_resamples);
    for (auto& rep : replicates) {
      std::size_t hits = 0;
      for (std::size_t j = 0; j < row.n; ++j) hits += not_baseline[pick(rng)];
      rep = hits / n;
    }
    std::sort(replicates.begin(), replicates.end());
    const auto quantile = [&replicates](double q) {
      const double pos = q * static_cast<double>(replicates.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, replicates.size() - 1);
      return replicates[lo] + (pos - lo) * (replicates[hi] - replicates[lo]);
    };
    row.ci_low = quantile(0.025);
    row.ci_high = quantile(0.975);
    rows.push_back(row);
  }
  return rows;
}

void WriteSweepCsv(const std::vector<SweepVerdict>& verdicts,
                   const std::vector<AggregationConfig>& configs,
                   std::ostream& out) {
  out << "config_index,p_group,p_class,verdict,p_value\n";
  for (const auto& v : verdicts) {
    const auto& cfg = configs.at(v.config_index);
    out << fmt::format("{},{},{},{},{}\n", v.config_index, cfg.p_group,
                       cfg.p_class, VerdictName(v.verdict), v.p_value);
  }
}

std::vector<SweepVerdict> ReadSweepCsv(std::istream& in) {
  std::vector<SweepVerdict> verdicts;
  std::string line;
  if (!std::getline(in, line)) return verdicts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (fields.size() != 5) {
      throw InvalidArgument("sweep CSV line " + std::to_string(line_no) +
                            ": expected 5 fields");
    }
    SweepVerdict v;
    v.config_index = std::stoul(fields[0]);
    v.verdict = ParseVerdict(fields[3]);
    v.p_value = std::stod(fields[4]);
    verdicts.push_back(v);
  }
  return verdicts;
}

void WriteSummaryCsv(const std::vector<FractionRow>& rows, std::ostream& out) {
  out << "bucket,n,frac_not_baseline_fairer,frac_hlv_fairer,ci_low,ci_high\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.bucket, r.n,
                       FormatOptional(r.frac_not_baseline_fairer),
                       FormatOptional(r.frac_hlv_fairer),
                       FormatOptional(r.ci_low), FormatOptional(r.ci_high));
  }
}

}  // namespace hlvfair
