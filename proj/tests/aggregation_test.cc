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
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "hlvfair/error.h"

namespace hlvfair {
namespace {

TEST(GeneralizedMeanTest, Examples) {
  const std::vector<double> s{0.5, 0.75}, w{0.5, 0.5};
  EXPECT_NEAR(GeneralizedMean(s, w, 1.0), 0.625, 1e-12);
  const std::vector<double> s2{0.25, 1.0};
  EXPECT_NEAR(GeneralizedMean(s2, w, -1.0), 0.4, 1e-12);
}

TEST(GeneralizedMeanTest, Idempotent) {
  const std::vector<double> s{0.37, 0.37, 0.37}, w{0.2, 0.5, 0.3};
  for (const double p : {-15.0, -3.0, -1e-12, 0.0, 1e-12, 1.0, 7.5, 15.0}) {
    EXPECT_NEAR(GeneralizedMean(s, w, p), 0.37, 1e-12) << p;
  }
}

TEST(GeneralizedMeanTest, ExtremesApproachMinAndMax) {
  const std::vector<double> s{0.2, 0.9}, w{0.5, 0.5};
  EXPECT_NEAR(GeneralizedMean(s, w, 14.9), 0.9, 0.05);
  EXPECT_NEAR(GeneralizedMean(s, w, -14.9), 0.2, 0.05);
}

TEST(GeneralizedMeanTest, GeometricBranchIsContinuous) {
  const std::vector<double> s{0.3, 0.6, 0.8}, w{0.2, 0.3, 0.5};
  const double geo = std::exp(0.2 * std::log(0.3) + 0.3 * std::log(0.6) +
                              0.5 * std::log(0.8));
  EXPECT_NEAR(GeneralizedMean(s, w, 0.0), geo, 1e-12);
  EXPECT_NEAR(GeneralizedMean(s, w, 1e-6), geo, 1e-6);
  EXPECT_NEAR(GeneralizedMean(s, w, -1e-6), geo, 1e-6);
}

TEST(GeneralizedMeanTest, MonotoneInP) {
  const std::vector<double> s{0.1, 0.4, 0.95}, w{0.3, 0.3, 0.4};
  double prev = 0.0;
  for (double p = -15.0; p <= 15.0; p += 0.5) {
    const double m = GeneralizedMean(s, w, p);
    EXPECT_GE(m, prev - 1e-12);
    EXPECT_GE(m, 0.1 - 1e-12);
    EXPECT_LE(m, 0.95 + 1e-12);
    prev = m;
  }
}

TEST(GeneralizedMeanTest, ZeroScores) {
  const std::vector<double> s{0.0, 0.8}, w{0.5, 0.5};
  EXPECT_EQ(GeneralizedMean(s, w, -2.0), 0.0);
  EXPECT_EQ(GeneralizedMean(s, w, 0.0), 0.0);
  EXPECT_NEAR(GeneralizedMean(s, w, 1.0), 0.4, 1e-12);
  // A zero score with zero weight does not count.
  const std::vector<double> w2{0.0, 1.0};
  EXPECT_NEAR(GeneralizedMean(s, w2, -2.0), 0.8, 1e-12);
}

TEST(GeneralizedMeanTest, RejectsBadInput) {
  const std::vector<double> s{0.5, 0.5};
  EXPECT_THROW(GeneralizedMean(s, std::vector<double>{0.5, 0.6}, 1.0),
               InvalidArgument);
  EXPECT_THROW(GeneralizedMean(s, std::vector<double>{1.0}, 1.0),
               InvalidArgument);
  EXPECT_THROW(GeneralizedMean(std::vector<double>{-0.1, 0.5},
                               std::vector<double>{0.5, 0.5}, 1.0),
               InvalidArgument);
}

TEST(AggregateTest, GroupsThenClasses) {
  FairnessMatrix fm(2, 2);
  fm.s = {1.0, 0.5, 0.8, 0.2};
  EXPECT_NEAR(Aggregate(fm, AggregationConfig::Equal(2, 2)), 0.625, 1e-12);

  auto cfg = AggregationConfig::Equal(2, 2);
  cfg.p_group = -15.0;
  EXPECT_NEAR(Aggregate(fm, cfg), (0.5 + 0.2) / 2.0, 0.05);
  EXPECT_NEAR(AggregateScores(fm.s, 2, 2, cfg), Aggregate(fm, cfg), 1e-15);
}

TEST(AggregateTest, OrderMatters) {
  FairnessMatrix fm(2, 2);
  fm.s = {1.0, 0.1, 1.0, 1.0};
  AggregationConfig cfg = AggregationConfig::Equal(2, 2);
  cfg.p_group = -10.0;
  cfg.p_class = 10.0;
  const std::vector<double> w{0.5, 0.5};
  const double row0 = GeneralizedMean(std::vector<double>{1.0, 0.1}, w, -10.0);
  const double expected =
      GeneralizedMean(std::vector<double>{row0, 1.0}, w, 10.0);
  EXPECT_NEAR(Aggregate(fm, cfg), expected, 1e-12);
}

TEST(AggregationConfigTest, Validate) {
  auto cfg = AggregationConfig::Equal(3, 4);
  EXPECT_NO_THROW(cfg.Validate());
  cfg.group_weights[0] += 0.01;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
  cfg = AggregationConfig::Equal(3, 4);
  cfg.p_class = 0.0;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
}

TEST(SampleConfigsTest, Properties) {
  const auto a = SampleConfigs(4000, 7, 3, 11);
  ASSERT_EQ(a.size(), 4000u);
  std::vector<double> mean(7, 0.0);
  for (const auto& c : a) {
    EXPECT_NO_THROW(c.Validate());
    EXPECT_LT(std::abs(c.p_group), 15.0);
    EXPECT_LT(std::abs(c.p_class), 15.0);
    for (std::size_t g = 0; g < 7; ++g) mean[g] += c.group_weights[g];
  }
  // Flat Dirichlet(7): mean 1/7, variance (1/7)(6/7)/8.
  const double se = std::sqrt((1.0 / 7.0) * (6.0 / 7.0) / 8.0 / 4000.0);
  for (const double m : mean) EXPECT_NEAR(m / 4000.0, 1.0 / 7.0, 3.0 * se);

  const auto b = SampleConfigs(4000, 7, 3, 11);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].group_weights, b[i].group_weights);
    EXPECT_EQ(a[i].p_class, b[i].p_class);
  }
  EXPECT_NE(SampleConfigs(1, 7, 3, 12)[0].p_group, a[0].p_group);
}

TEST(PLevelTest, Boundaries) {
  EXPECT_EQ(PLevelOf(-7.0), PLevel::kLow);
  EXPECT_EQ(PLevelOf(-5.0), PLevel::kMid);
  EXPECT_EQ(PLevelOf(0.0), PLevel::kMid);
  EXPECT_EQ(PLevelOf(5.0), PLevel::kMid);
  EXPECT_EQ(PLevelOf(6.2), PLevel::kHigh);
  EXPECT_EQ(PLevelName(PLevel::kLow), "low");
}

TEST(ConfigsIoTest, RoundTrip) {
  const auto configs = SampleConfigs(20, 3, 5, 2);
  std::stringstream ss;
  WriteConfigs(configs, ss);
  const auto back = ReadConfigs(ss);
  ASSERT_EQ(back.size(), configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    EXPECT_EQ(back[i].group_weights, configs[i].group_weights);
    EXPECT_EQ(back[i].class_weights, configs[i].class_weights);
    EXPECT_EQ(back[i].p_group, configs[i].p_group);
    EXPECT_EQ(back[i].p_class, configs[i].p_class);
  }
}

}  // namespace
}  // namespace hlvfair
