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

#include "hlvfair/metrics.h"

#include <random>

#include <gtest/gtest.h>

#include "hlvfair/error.h"
#include "test_util.h"

namespace hlvfair {
namespace {

using testing::AllRows;
using testing::FromRows;
using testing::MakeSchema;

constexpr auto kDist = LabelSemantics::kDistribution;
constexpr auto kMarg = LabelSemantics::kMarginals;

TEST(SoftF1Test, Examples) {
  const auto p = FromRows({{0.6}, {0.2}}, kMarg);
  const auto q = FromRows({{0.4}, {0.4}}, kMarg);
  EXPECT_NEAR(SoftF1Class(p, q, 0, AllRows(2)), 0.75, 1e-12);
  EXPECT_NEAR(SoftF1Class(p, p, 0, AllRows(2)), 1.0, 1e-12);

  const auto one = FromRows({{1.0}}, kMarg);
  const auto zero = FromRows({{0.0}}, kMarg);
  EXPECT_EQ(SoftF1Class(one, zero, 0, AllRows(1)), 0.0);
  EXPECT_EQ(SoftF1Class(zero, zero, 0, AllRows(1)), 0.0);
}

TEST(SoftF1Test, RepeatedRowsCountTwice) {
  const auto p = FromRows({{0.6}, {0.2}}, kMarg);
  const auto q = FromRows({{0.4}, {0.4}}, kMarg);
  const std::vector<std::size_t> rows{0, 0, 1};
  // 2 * (0.4 + 0.4 + 0.2) / (1.0 + 1.0 + 0.6)
  EXPECT_NEAR(SoftF1Class(p, q, 0, rows), 2.0 / 2.6, 1e-12);
}

TEST(SoftMicroF1Test, Examples) {
  const auto p = FromRows({{1.0, 0.0}}, kDist);
  const auto q = FromRows({{0.5, 0.5}}, kDist);
  EXPECT_NEAR(SoftMicroF1(p, q), 0.5, 1e-12);
  EXPECT_NEAR(SoftMicroF1(p, p), 1.0, 1e-12);
}

TEST(SoftMicroF1Test, OneHotEqualsAccuracy) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, 4);
  const std::size_t n = 1000, k = 5;
  LabelMatrix p(n, k, kDist), q(n, k, kDist);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = pick(rng), b = pick(rng);
    p(i, a) = 1.0;
    q(i, b) = 1.0;
    correct += a == b;
  }
  EXPECT_NEAR(SoftMicroF1(p, q),
              static_cast<double>(correct) / static_cast<double>(n), 1e-12);
}

TEST(SoftMicroF1Test, ShapeMismatchThrows) {
  const auto p = FromRows({{1.0, 0.0}}, kDist);
  const auto q = FromRows({{1.0, 0.0, 0.0}}, kDist);
  EXPECT_THROW(SoftMicroF1(p, q), InvalidArgument);
}

TEST(FairnessScoreTest, Examples) {
  EXPECT_EQ(FairnessScore(0.0, 0.0), 1.0);
  EXPECT_EQ(FairnessScore(0.7, 0.7), 1.0);
  EXPECT_NEAR(FairnessScore(0.4, 0.8), 0.5, 1e-12);
  EXPECT_NEAR(FairnessScore(0.8, 0.4), 0.5, 1e-12);
  EXPECT_EQ(FairnessScore(0.0, 0.3), 0.0);
  EXPECT_THROW(FairnessScore(-0.1, 0.3), InvalidArgument);
}

Dataset ThreeInstances() {
  Dataset ds{MakeSchema(TaskKind::kSingleLabel, 2, 2), {}};
  for (const auto m : {Membership::kIn, Membership::kOut, Membership::kUnknown}) {
    Instance inst;
    inst.id = "i" + std::to_string(ds.instances.size() + 1);
    inst.annotations.push_back({std::nullopt, {0}});
    inst.membership = {m, Membership::kOut};
    inst.split = Split::kTest;
    ds.instances.push_back(inst);
  }
  return ds;
}

TEST(PartitionSubsetsTest, TriStateRouting) {
  const auto ds = ThreeInstances();
  const auto pairs = PartitionSubsets(ds, Split::kTest);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].in_ids, std::vector<std::string>{"i1"});
  EXPECT_EQ(pairs[0].out_ids, std::vector<std::string>{"i2"});
  EXPECT_EQ(pairs[0].in_rows, std::vector<std::size_t>{0});
  // Second group: out-group everywhere.
  EXPECT_TRUE(pairs[1].in_ids.empty());
  EXPECT_EQ(pairs[1].out_ids.size(), 3u);
  // Empty split.
  for (const auto& pair : PartitionSubsets(ds, Split::kTrain)) {
    EXPECT_TRUE(pair.in_ids.empty());
    EXPECT_TRUE(pair.out_ids.empty());
  }
}

TEST(FairnessMatrixTest, PerfectPredictionsAreFair) {
  Dataset ds{MakeSchema(TaskKind::kMultiLabel, 3, 2), {}};
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 40; ++i) {
    Instance inst;
    inst.id = std::to_string(i);
    inst.annotations.push_back({std::nullopt, {static_cast<std::size_t>(i % 3)}});
    inst.membership = {coin(rng) ? Membership::kIn : Membership::kOut,
                       i % 2 ? Membership::kIn : Membership::kOut};
    inst.split = Split::kTest;
    ds.instances.push_back(inst);
  }
  const auto p = SoftLabels(ds, Split::kTest);
  const auto fm = ComputeFairnessMatrix(p, p, ds, Split::kTest);
  for (const double s : fm.s) EXPECT_EQ(s, 1.0);
  for (const auto f : fm.flags) EXPECT_EQ(f, 0);
}

TEST(FairnessMatrixTest, SingleCellRatio) {
  // K = 1, G = 1: in-subset F = 0.9, out-subset F = 0.45.
  Dataset ds{MakeSchema(TaskKind::kMultiLabel, 2, 1), {}};
  for (const auto m : {Membership::kIn, Membership::kOut}) {
    Instance inst;
    inst.id = m == Membership::kIn ? "in" : "out";
    inst.annotations.push_back({std::nullopt, {0}});
    inst.membership = {m};
    inst.split = Split::kTest;
    ds.instances.push_back(inst);
  }
  // P = 1 on class 0. F = 2q / (1 + q): q = 9/11 gives 0.9, q = 9/31 gives
  // 0.45.
  const auto p = FromRows({{1.0, 0.0}, {1.0, 0.0}}, kMarg);
  const auto q = FromRows({{9.0 / 11.0, 0.0}, {9.0 / 31.0, 0.0}}, kMarg);
  const auto fm = ComputeFairnessMatrix(p, q, ds, Split::kTest);
  EXPECT_NEAR(fm.f_in[fm.index(0, 0)], 0.9, 1e-12);
  EXPECT_NEAR(fm.f_out[fm.index(0, 0)], 0.45, 1e-12);
  EXPECT_NEAR(fm.score(0, 0), 0.5, 1e-12);
  // Class 1 has no mass anywhere: both F are 0 and s is 1.
  EXPECT_EQ(fm.score(1, 0), 1.0);
}

TEST(FairnessMatrixTest, EmptyInSubsetIsFlagged) {
  auto ds = ThreeInstances();
  const auto p = SoftLabels(ds, Split::kTest);
  const auto fm = ComputeFairnessMatrix(p, p, ds, Split::kTest);
  // Group 1 has no in-group member.
  EXPECT_TRUE(fm.flagged(0, 1));
  EXPECT_EQ(fm.f_in[fm.index(0, 1)], 0.0);
  EXPECT_EQ(fm.score(0, 1), 0.0);
  EXPECT_FALSE(fm.flagged(0, 0));
}

TEST(FairnessMatrixTest, MatchesSubsetComputation) {
  std::mt19937_64 rng(9);
  Dataset ds{MakeSchema(TaskKind::kMultiLabel, 4, 3), {}};
  std::uniform_int_distribution<int> m(0, 2);
  for (int i = 0; i < 60; ++i) {
    Instance inst;
    inst.id = std::to_string(i);
    inst.annotations.push_back({std::nullopt, {static_cast<std::size_t>(i % 4)}});
    for (int g = 0; g < 3; ++g) {
      inst.membership.push_back(static_cast<Membership>(m(rng)));
    }
    inst.split = Split::kTest;
    ds.instances.push_back(inst);
  }
  const auto p = testing::RandomMarginals(60, 4, rng);
  const auto q = testing::RandomMarginals(60, 4, rng);
  const auto fm = ComputeFairnessMatrix(p, q, ds, Split::kTest);
  const auto pairs = PartitionSubsets(ds, Split::kTest);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t g = 0; g < 3; ++g) {
      const double fin = SoftF1Class(p, q, k, pairs[g].in_rows);
      const double fout = SoftF1Class(p, q, k, pairs[g].out_rows);
      EXPECT_NEAR(fm.f_in[fm.index(k, g)], fin, 1e-12);
      EXPECT_NEAR(fm.f_out[fm.index(k, g)], fout, 1e-12);
      EXPECT_NEAR(fm.score(k, g), FairnessScore(fout, fin), 1e-12);
    }
  }
  const auto back = FairnessMatrixFromJson(FairnessMatrixToJson(fm));
  EXPECT_EQ(back.s, fm.s);
  EXPECT_EQ(back.flags, fm.flags);
}

}  // namespace
}  // namespace hlvfair
