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

#include "hlvfair/aggregation.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "hlvfair/error.h"
#include "hlvfair/random.h"
#include "json.hpp"

namespace hlvfair {
namespace {

constexpr double kSimplexTolerance = 1e-9;
constexpr double kExponentBound = 15.0;

void CheckSimplex(std::span<const double> weights, const char* what) {
  if (weights.empty()) {
    throw InvalidArgument(std::string(what) + " must not be empty");
  }
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument(std::string(what) + " must be non-negative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    throw InvalidArgument(std::string(what) + " must sum to 1");
  }
}

// Assumes validated inputs. Weights are renormalised so the 1e-9 simplex
// slack does not leak through 1/p near the geometric branch. Terms are
// scaled by the max (p > 0) or min (p < 0) score so that every power lies in
// [0, 1] and nothing overflows at |p| = 15.
double PowerMean(std::span<const double> scores,
                 std::span<const double> weights, double p) {
  double weight_sum = 0.0;
  double ref_max = 0.0;
  double ref_min = std::numeric_limits<double>::infinity();
  bool zero_present = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    weight_sum += weights[i];
    ref_max = std::max(ref_max, scores[i]);
    ref_min = std::min(ref_min, scores[i]);
    zero_present |= scores[i] == 0.0;
  }
  if (std::abs(p) < kGeometricBranch) {
    if (zero_present) return 0.0;
    double log_mean = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (weights[i] > 0.0) {
        log_mean += weights[i] / weight_sum * std::log(scores[i]);
      }
    }
    return std::exp(log_mean);
  }
  if (p < 0.0 && zero_present) return 0.0;
  const double ref = p > 0.0 ? ref_max : ref_min;
  if (ref == 0.0) return 0.0;

  // acc - 1 where acc = sum_i w_i (s_i / ref)^p, kept in expm1 form so that
  // small |p| stays accurate.
  double acc_minus_one = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    const double w = weights[i] / weight_sum;
    if (scores[i] == 0.0) {
      acc_minus_one -= w;  // (0 / ref)^p = 0 for p > 0
    } else {
      acc_minus_one += w * std::expm1(p * std::log(scores[i] / ref));
    }
  }
  return ref * std::exp(std::log1p(acc_minus_one) / p);
}

double DrawExponent(Rng& rng) {
  std::uniform_real_distribution<double> uniform(-kExponentBound,
                                                 kExponentBound);
  for (;;) {
    const double p = uniform(rng);
    if (std::abs(p) >= kGeometricBranch && std::abs(p) < kExponentBound) {
      return p;
    }
  }
}

std::vector<double> DrawFlatDirichlet(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> gamma_one(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = gamma_one(rng);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace

double GeneralizedMean(std::span<const double> scores,
                       std::span<const double> weights, double p) {
  if (scores.empty() || scores.size() != weights.size()) {
    throw InvalidArgument(
        "scores and weights must have the same non-zero length");
  }
  for (const double s : scores) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw InvalidArgument("scores must be finite and non-negative");
    }
  }
  CheckSimplex(weights, "weights");
  if (!std::isfinite(p)) throw InvalidArgument("exponent must be finite");
  return PowerMean(scores, weights, p);
}

void AggregationConfig::Validate() const {
  CheckSimplex(group_weights, "group weights");
  CheckSimplex(class_weights, "class weights");
  if (!(std::abs(p_group) >= kGeometricBranch) || !std::isfinite(p_group) ||
      !(std::abs(p_class) >= kGeometricBranch) || !std::isfinite(p_class)) {
    throw InvalidArgument("exponents must be finite and non-zero");
  }
}

AggregationConfig AggregationConfig::Equal(std::size_t num_groups,
                                           std::size_t num_classes) {
  AggregationConfig cfg;
  cfg.group_weights.assign(num_groups, 1.0 / static_cast<double>(num_groups));
  cfg.class_weights.assign(num_classes,
                           1.0 / static_cast<double>(num_classes));
  return cfg;
}

double AggregateScores(std::span<const double> s, std::size_t num_classes,
                       std::size_t num_groups, const AggregationConfig& cfg) {
  if (s.size() != num_classes * num_groups ||
      cfg.group_weights.size() != num_groups ||
      cfg.class_weights.size() != num_classes) {
    throw InvalidArgument(
        "fairness matrix and configuration dimensions differ");
  }
  std::vector<double> class_means(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    class_means[k] = PowerMean(s.subspan(k * num_groups, num_groups),
                               cfg.group_weights, cfg.p_group);
  }
  return PowerMean(class_means, cfg.class_weights, cfg.p_class);
}

double Aggregate(const FairnessMatrix& fm, const AggregationConfig& cfg) {
  cfg.Validate();
  for (const double v : fm.s) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("fairness scores must lie in [0, 1]");
    }
  }
  return AggregateScores(fm.s, fm.num_classes, fm.num_groups, cfg);
}

std::vector<AggregationConfig> SampleConfigs(std::size_t count,
                                             std::size_t num_groups,
                                             std::size_t num_classes,
                                             std::uint64_t seed) {
  if (count == 0) throw InvalidArgument("configuration count must be >= 1");
  if (num_groups == 0 || num_classes == 0) {
    throw InvalidArgument("need at least one group and one class");
  }
  Rng rng(seed);
  std::vector<AggregationConfig> configs(count);
  for (auto& cfg : configs) {
    cfg.group_weights = DrawFlatDirichlet(num_groups, rng);
    cfg.class_weights = DrawFlatDirichlet(num_classes, rng);
    cfg.p_group = DrawExponent(rng);
    cfg.p_class = DrawExponent(rng);
  }
  return configs;
}

PLevel PLevelOf(double p) {
  if (p < -5.0) return PLevel::kLow;
  if (p > 5.0) return PLevel::kHigh;
  return PLevel::kMid;
}

std::string_view PLevelName(PLevel level) {
  switch (level) {
    case PLevel::kLow:
      return "low";
    case PLevel::kMid:
      return "mid";
    case PLevel::kHigh:
      return "high";
  }
  return "mid";
}

void WriteConfigs(const std::vector<AggregationConfig>& configs,
                  std::ostream& out) {
  for (std::size_t i = 0; i < configs.size(); ++i) {
    nlohmann::ordered_json j;
    j["gw"] = configs[i].group_weights;
    j["cw"] = configs[i].class_weights;
    j["pg"] = configs[i].p_group;
    j["pc"] = configs[i].p_class;
    j["index"] = i;
    out << j.dump() << '\n';
  }
}

std::vector<AggregationConfig> ReadConfigs(std::istream& in) {
  std::vector<AggregationConfig> configs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AggregationConfig cfg;
      cfg.group_weights = j.at("gw").get<std::vector<double>>();
      cfg.class_weights = j.at("cw").get<std::vector<double>>();
      cfg.p_group = j.at("pg").get<double>();
      cfg.p_class = j.at("pc").get<double>();
      if (j.at("index").get<std::size_t>() != configs.size()) {
        throw InvalidArgument("configuration index out of sequence");
      }
      cfg.Validate();
      configs.push_back(std::move(cfg));
    } catch (const std::exception& e) {
      throw InvalidArgument("configuration line " + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return configs;
}

}  // namespace hlvfair
