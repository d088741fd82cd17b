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

#include "hlvfair/synth.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "hlvfair/error.h"

namespace hlvfair {
namespace {

bool MarksRare(const Instance& inst, std::size_t rare) {
  for (const auto& a : inst.annotations) {
    if (std::find(a.labels.begin(), a.labels.end(), rare) != a.labels.end()) {
      return true;
    }
  }
  return false;
}

struct Rates {
  double in = 0.0;
  double out = 0.0;
  double corr = 0.0;
};

// Rate of instances with at least one rare-class annotation inside and
// outside the correlated group, and the correlation of the two indicators.
Rates RareRates(const Dataset& ds, const SynthConfig& cfg) {
  double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  double in_hits = 0, in_n = 0, out_hits = 0, out_n = 0;
  for (const auto& inst : ds.instances) {
    const auto m = inst.membership[cfg.correlated_group];
    if (m == Membership::kUnknown) continue;
    const double x = m == Membership::kIn;
    const double y = MarksRare(inst, cfg.rare_class);
    (x ? in_hits : out_hits) += y;
    (x ? in_n : out_n) += 1;
    n += 1;
    sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
  }
  Rates r;
  r.in = in_hits / in_n;
  r.out = out_hits / out_n;
  const double cov = sxy / n - sx / n * sy / n;
  r.corr = cov / std::sqrt((sxx / n - sx * sx / n / n) *
                           (syy / n - sy * sy / n / n));
  return r;
}

TEST(SynthTest, ShapeAndSplits) {
  const SynthConfig cfg;
  const auto ds = Generate(cfg);
  ASSERT_EQ(ds.instances.size(), cfg.n_instances);
  EXPECT_EQ(ds.schema.task, TaskKind::kMultiLabel);
  EXPECT_EQ(ds.schema.num_classes(), cfg.num_classes);
  EXPECT_NO_THROW(ValidateDataset(ds));
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& inst : ds.instances) {
    EXPECT_EQ(inst.annotations.size(), cfg.annotators_per_instance);
    EXPECT_EQ(inst.membership.size(), cfg.num_groups);
    EXPECT_FALSE(inst.text.empty());
    ++counts[static_cast<int>(inst.split)];
  }
  EXPECT_EQ(counts[0], 1600u);
  EXPECT_EQ(counts[1], 200u);
  EXPECT_EQ(counts[2], 200u);
}

TEST(SynthTest, Deterministic) {
  SynthConfig cfg;
  cfg.n_instances = 300;
  std::ostringstream a, b, c;
  WriteDataset(Generate(cfg), a);
  WriteDataset(Generate(cfg), b);
  cfg.seed = 1;
  WriteDataset(Generate(cfg), c);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str(), c.str());
}

TEST(SynthTest, NoCorrelationAtZeroRho) {
  SynthConfig cfg;
  cfg.group_correlation = 0.0;
  cfg.rare_base_rate = 0.2;
  const auto r = RareRates(Generate(cfg), cfg);
  EXPECT_LT(std::abs(r.corr), 0.1);
}

TEST(SynthTest, CorrelatedGroupSeesRareClass) {
  const SynthConfig cfg;
  const auto r = RareRates(Generate(cfg), cfg);
  EXPECT_GE(r.in, 3.0 * r.out);
}

TEST(SynthTest, MajorityVoteDropsMinorityRareClass) {
  const SynthConfig cfg;
  const auto ds = Generate(cfg);
  std::size_t minority = 0;
  for (const auto& inst : ds.instances) {
    std::size_t marks = 0;
    for (const auto& a : inst.annotations) {
      marks += std::count(a.labels.begin(), a.labels.end(), cfg.rare_class);
    }
    if (marks == 0 || 2 * marks >= inst.annotations.size()) continue;
    ++minority;
    const auto mv = MajorityVote(inst, ds.schema);
    EXPECT_EQ(std::count(mv.begin(), mv.end(), cfg.rare_class), 0);
  }
  EXPECT_GT(minority, 0u);
}

TEST(SynthTest, ConfigJsonRoundTrip) {
  SynthConfig cfg;
  cfg.seed = 42;
  cfg.group_correlation = 0.5;
  const auto json = SynthConfigToJson(cfg);
  EXPECT_EQ(SynthConfigToJson(SynthConfigFromJson(json)), json);
  EXPECT_THROW(SynthConfigFromJson("{\"num_classes\": 1}"), InvalidArgument);
}

TEST(SynthTest, DatasetRoundTrip) {
  SynthConfig cfg;
  cfg.n_instances = 100;
  const auto ds = Generate(cfg);
  std::ostringstream once;
  WriteDataset(ds, once);
  const auto path = std::filesystem::temp_directory_path() /
                    "hlvfair_synth_roundtrip.jsonl";
  SaveDataset(ds, path);
  std::ostringstream twice;
  WriteDataset(LoadDataset(path, ds.schema), twice);
  std::filesystem::remove(path);
  EXPECT_EQ(once.str(), twice.str());
}

TEST(SynthTest, RejectsBadConfig) {
  SynthConfig cfg;
  cfg.rare_class = 8;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
  cfg = SynthConfig{};
  cfg.group_correlation = 1.5;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
}

}  // namespace
}  // namespace hlvfair
