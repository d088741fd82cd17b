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

// Weighted generalised-mean aggregation of fairness scores (groups first,
// then classes), random configuration sampling and exponent levels.

#ifndef HLVFAIR_AGGREGATION_H_
#define HLVFAIR_AGGREGATION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hlvfair/metrics.h"

namespace hlvfair {

// Exponents closer to zero than this use the geometric-mean limit.
inline constexpr double kGeometricBranch = 1e-9;

// (sum_i w_i s_i^p)^(1/p). Within kGeometricBranch of p = 0 the weighted
// geometric mean is returned. A positively weighted zero score makes the
// result 0 for p <= 0. Throws InvalidArgument on negative scores, a length
// mismatch or weights off the simplex.
double GeneralizedMean(std::span<const double> scores,
                       std::span<const double> weights, double p);

struct AggregationConfig {
  std::vector<double> group_weights;
  std::vector<double> class_weights;
  double p_group = 1.0;
  double p_class = 1.0;

  // Throws InvalidArgument when a weight vector leaves the simplex (1e-9
  // tolerance) or an exponent is within kGeometricBranch of zero.
  void Validate() const;

  // Uniform weights, p = 1 for both levels.
  static AggregationConfig Equal(std::size_t num_groups,
                                 std::size_t num_classes);
};

// Group-wise generalised mean of every class row, then the class-wise mean
// of those.
double Aggregate(const FairnessMatrix& fm, const AggregationConfig& cfg);

// Same over a raw class-major K x G score array. `cfg` must already be
// valid; only the dimensions are checked.
double AggregateScores(std::span<const double> s, std::size_t num_classes,
                       std::size_t num_groups, const AggregationConfig& cfg);

// Group and class weights from a flat Dirichlet, both exponents from
// U(-15, 15); draws with |p| < kGeometricBranch are redrawn. Deterministic
// given the seed.
std::vector<AggregationConfig> SampleConfigs(std::size_t count,
                                             std::size_t num_groups,
                                             std::size_t num_classes,
                                             std::uint64_t seed);

enum class PLevel { kLow, kMid, kHigh };

// low: p < -5, mid: -5 <= p <= 5, high: p > 5.
PLevel PLevelOf(double p);
std::string_view PLevelName(PLevel level);

// JSONL, one {"gw", "cw", "pg", "pc", "index"} object per line.
void WriteConfigs(const std::vector<AggregationConfig>& configs,
                  std::ostream& out);
std::vector<AggregationConfig> ReadConfigs(std::istream& in);

}  // namespace hlvfair

#endif  // HLVFAIR_AGGREGATION_H_
