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

// Paired bootstrap significance tests between training methods and the
// robustness analysis over many sampled aggregation configurations.
//
// The bootstrap resamples test instances with replacement. For every
// resample the statistic is computed on each run of a method and averaged
// over runs; the paired design feeds both methods the same resamples. The
// two-tailed p-value centres the bootstrap differences on the observed one:
//
//   p = 2 * min(#{d* - d >= d}, #{d* - d <= d}) / B, clamped to [0, 1].

#ifndef HLVFAIR_STATS_H_
#define HLVFAIR_STATS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hlvfair/aggregation.h"
#include "hlvfair/annotations.h"

namespace hlvfair {

inline constexpr std::size_t kDefaultResamples = 10000;
inline constexpr std::size_t kMinResamples = 100;
inline constexpr double kDefaultAlpha = 0.05;

// Predictions of one method over the test split, one matrix per run.
struct MethodScores {
  std::string method;
  // Instance ids of the rows; may be left empty to skip the id check.
  std::vector<std::string> ids;
  std::vector<LabelMatrix> runs;

  std::size_t num_rows() const { return runs.empty() ? 0 : runs[0].rows(); }
  // Throws InvalidArgument when there are no runs or shapes differ.
  void Validate() const;
};

// `count` resamples of the rows 0..n-1 drawn with replacement.
class ResamplePlan {
 public:
  ResamplePlan(std::size_t n, std::size_t count, std::uint64_t seed);

  std::size_t num_rows() const { return n_; }
  std::size_t size() const { return count_; }
  std::span<const std::size_t> resample(std::size_t b) const {
    return {rows_.data() + b * n_, n_};
  }

 private:
  std::size_t n_;
  std::size_t count_;
  std::vector<std::size_t> rows_;
};

// Metric of one prediction matrix over a list of rows (repeats allowed).
using Statistic =
    std::function<double(const LabelMatrix& q, std::span<const std::size_t>)>;

struct BootstrapResult {
  double observed_difference = 0.0;  // mean(a) - mean(b)
  double p_value = 1.0;
};

double TwoTailedPValue(double observed, std::span<const double> resampled);

BootstrapResult PairedBootstrapTest(const MethodScores& a,
                                    const MethodScores& b,
                                    const Statistic& statistic,
                                    const ResamplePlan& plan);

// Builds ResamplePlan(rows, resamples, seed). Throws when resamples < 100
// or the two methods were evaluated on different instances.
BootstrapResult PairedBootstrapTest(const MethodScores& a,
                                    const MethodScores& b,
                                    const Statistic& statistic,
                                    std::size_t resamples, std::uint64_t seed);

enum class Verdict { kBaselineFairer, kHlvFairer, kNoSignificantDifference };

std::string_view VerdictName(Verdict verdict);
Verdict ParseVerdict(std::string_view name);

struct SweepVerdict {
  std::size_t config_index = 0;
  Verdict verdict = Verdict::kNoSignificantDifference;
  double p_value = 1.0;
  double observed_difference = 0.0;  // mean fairness hlv - baseline
};

struct SweepOptions {
  double alpha = kDefaultAlpha;
  std::size_t resamples = kDefaultResamples;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// For each configuration, a paired bootstrap test of the aggregated test
// fairness of `hlv` against `baseline`, ground truth being the tau = 1 soft
// labels of the dataset's test split. All configurations share the
// ResamplePlan(test rows, resamples, seed), so verdict i equals
// PairedBootstrapTest(hlv, baseline, Aggregate(ComputeFairnessMatrix(...),
// configs[i]), resamples, seed).
std::vector<SweepVerdict> ConfigSweep(
    const MethodScores& baseline, const MethodScores& hlv,
    const Dataset& dataset, const std::vector<AggregationConfig>& configs,
    const SweepOptions& options);

enum class BucketBy { kOverall, kPGroupLevel, kPClassLevel };

struct FractionRow {
  std::string bucket;
  std::size_t n = 0;
  // All nullopt for an empty bucket.
  std::optional<double> frac_not_baseline_fairer;
  std::optional<double> frac_hlv_fairer;
  // 95% percentile bootstrap interval of frac_not_baseline_fairer.
  std::optional<double> ci_low;
  std::optional<double> ci_high;
};

std::vector<FractionRow> FractionSummary(
    const std::vector<SweepVerdict>& verdicts,
    const std::vector<AggregationConfig>& configs, BucketBy by,
    std::size_t ci_resamples, std::uint64_t seed);

// config_index,p_group,p_class,verdict,p_value
void WriteSweepCsv(const std::vector<SweepVerdict>& verdicts,
                   const std::vector<AggregationConfig>& configs,
                   std::ostream& out);
std::vector<SweepVerdict> ReadSweepCsv(std::istream& in);

// bucket,n,frac_not_baseline_fairer,frac_hlv_fairer,ci_low,ci_high; empty
// buckets print NA.
void WriteSummaryCsv(const std::vector<FractionRow>& rows, std::ostream& out);

}  // namespace hlvfair

#endif  // HLVFAIR_STATS_H_
