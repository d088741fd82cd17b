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

#include "hlvfair/training.h"

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hlvfair/error.h"
#include "gradient_check.h"
#include "test_util.h"

namespace hlvfair {
namespace {


// A model whose output on the zero vector is `target`.
Model ModelPredicting(TaskKind task, const std::vector<double>& target) {
  Model model(task, target.size(), 8);
  for (std::size_t k = 0; k < target.size(); ++k) {
    model.bias()[k] = task == TaskKind::kSingleLabel
                          ? std::log(target[k])
                          : std::log(target[k] / (1.0 - target[k]));
  }
  return model;
}

TEST(LossTest, PerfectPredictionSingleLabel) {
  const std::vector<double> p{0.5, 0.3, 0.2};
  const auto model = ModelPredicting(TaskKind::kSingleLabel, p);
  const std::vector<Example> batch{{SparseVector{}, p}};
  double entropy = 0.0;
  for (const double x : p) entropy -= x * std::log(x);
  EXPECT_NEAR(ComputeLossAndGradient(Method::kSL, model, batch).loss, entropy,
              1e-9);
  EXPECT_NEAR(ComputeLossAndGradient(Method::kJSD, model, batch).loss, 0.0,
              1e-9);
  EXPECT_NEAR(ComputeLossAndGradient(Method::kSmF1, model, batch).loss, -1.0,
              1e-9);
}

TEST(LossTest, PerfectPredictionMultiLabel) {
  const std::vector<double> p{0.8, 0.4, 0.1};
  const auto model = ModelPredicting(TaskKind::kMultiLabel, p);
  const std::vector<Example> batch{{SparseVector{}, p}};
  EXPECT_NEAR(ComputeLossAndGradient(Method::kJSD, model, batch).loss, 0.0,
              1e-9);
  EXPECT_NEAR(ComputeLossAndGradient(Method::kSmF1, model, batch).loss, -1.0,
              1e-9);
}

TEST(LossTest, JsdOfDisjointDistributions) {
  Model model(TaskKind::kSingleLabel, 2, 8);
  model.bias() = {-40.0, 0.0};
  const std::vector<Example> batch{{SparseVector{}, {1.0, 0.0}}};
  EXPECT_NEAR(ComputeLossAndGradient(Method::kJSD, model, batch).loss,
              std::log(2.0), 1e-3);
}

TEST(LossTest, RejectsUnsuitableTargets) {
  Model model(TaskKind::kSingleLabel, 2, 8);
  const std::vector<Example> soft{{SparseVector{}, {0.5, 0.5}}};
  EXPECT_THROW(ComputeLossAndGradient(Method::kMV, model, soft),
               InvalidArgument);
  EXPECT_THROW(ComputeLossAndGradient(Method::kSL, model, {}),
               InvalidArgument);
  const std::vector<Example> unnormalised{{SparseVector{}, {0.5, 0.2}}};
  EXPECT_THROW(ComputeLossAndGradient(Method::kSL, model, unnormalised),
               InvalidArgument);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  for (const auto task : {TaskKind::kSingleLabel, TaskKind::kMultiLabel}) {
    for (const auto method : kAllMethods) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto r = testing::CheckGradient(
            task, method, seed * 31 + static_cast<int>(method));
        if (r.tie) continue;
        EXPECT_GE(r.checked, 50u) << MethodName(method);
        EXPECT_LT(r.max_relative_error, 1e-4) << MethodName(method);
      }
    }
  }
}

TEST(FeaturizeTest, Basics) {
  const FeatureSpec spec;
  const auto empty = Featurize("   ", spec);
  EXPECT_TRUE(empty.indices.empty());
  EXPECT_TRUE(Featurize("", spec).indices.empty());

  const auto v = Featurize("Hello, hello world!", spec);
  ASSERT_EQ(v.indices.size(), 2u);
  EXPECT_LT(v.indices[0], v.indices[1]);
  double norm = 0.0;
  for (const double x : v.values) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_EQ(Tokenize("A-b c"), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(FeaturizeTest, FewCollisions) {
  std::set<std::uint32_t> seen;
  std::size_t collisions = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto v = Featurize("tok" + std::to_string(i), FeatureSpec{});
    ASSERT_EQ(v.indices.size(), 1u);
    collisions += !seen.insert(v.indices[0]).second;
  }
  EXPECT_LT(collisions, 50u);
}

// Three classes, each with its own word set; single annotations. With
// `replay` the test split repeats the train texts.
Dataset SeparableDataset(std::size_t n, bool replay = false) {
  Dataset ds{testing::MakeSchema(TaskKind::kSingleLabel, 3, 1), {}};
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> word(0, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % 3;
    auto inst = testing::MakeInstance("x" + std::to_string(i), {{c}});
    for (int t = 0; t < 5; ++t) {
      inst.text += "w" + std::to_string(c) + "_" + std::to_string(word(rng)) + " ";
    }
    inst.split = replay || i < n * 4 / 5 ? Split::kTrain : Split::kTest;
    ds.instances.push_back(inst);
  }
  if (replay) {
    for (std::size_t i = 0; i < n; ++i) {
      auto copy = ds.instances[i];
      copy.id = "t" + copy.id;
      copy.split = Split::kTest;
      ds.instances.push_back(copy);
    }
  }
  return ds;
}

TEST(TrainTest, LearnsSeparableData) {
  const auto ds = SeparableDataset(200, true);
  TrainConfig cfg;
  cfg.method = Method::kMV;
  cfg.learning_rate = 0.1;
  cfg.epochs = 10;
  const auto record = Train(ds, cfg, FeatureSpec{});
  EXPECT_GE(SoftMicroF1(SoftLabels(ds, Split::kTest), record.test.q), 0.9);

  const auto again = Train(ds, cfg, FeatureSpec{});
  EXPECT_EQ(RunRecordToJson(record), RunRecordToJson(again));
  cfg.seed = 1;
  EXPECT_NE(RunRecordToJson(Train(ds, cfg, FeatureSpec{})),
            RunRecordToJson(record));
}

TEST(TrainTest, RepeatedLabelExamples) {
  Dataset ds{testing::MakeSchema(TaskKind::kSingleLabel, 3, 1), {}};
  ds.instances.push_back(testing::MakeInstance("a", {{0}, {1}, {1}}));
  ds.instances.push_back(testing::MakeInstance("b", {{2}}, 1, Split::kTest));
  TrainConfig cfg;
  cfg.method = Method::kReL;
  const auto examples = BuildExamples(ds, cfg, FeatureSpec{});
  ASSERT_EQ(examples.size(), 3u);
  EXPECT_EQ(examples[0].target, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(examples[2].target, (std::vector<double>{0.0, 1.0, 0.0}));
  cfg.method = Method::kSL;
  const auto soft = BuildExamples(ds, cfg, FeatureSpec{});
  ASSERT_EQ(soft.size(), 1u);
  EXPECT_NEAR(soft[0].target[1], 2.0 / 3.0, 1e-12);
}

TEST(TrainTest, RunRecordRoundTrip) {
  const auto ds = SeparableDataset(60);
  TrainConfig cfg;
  cfg.method = Method::kSL;
  cfg.epochs = 2;
  const auto record = Train(ds, cfg, FeatureSpec{1024});
  const auto json = RunRecordToJson(record);
  EXPECT_EQ(RunRecordToJson(RunRecordFromJson(json)), json);
}

TEST(TrainTest, ConfigValidation) {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
  cfg = TrainConfig{};
  cfg.tau = -1.0;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
  EXPECT_EQ(ParseMethod(MethodName(Method::kSmF1)), Method::kSmF1);
  EXPECT_THROW(ParseMethod("XX"), InvalidArgument);
}

TEST(TemperatureSweepTest, TauOneMatchesPlainSl) {
  const auto ds = SeparableDataset(90);
  TrainConfig cfg;
  cfg.method = Method::kSL;
  cfg.epochs = 3;
  const std::vector<double> grid{1.0};
  const auto eval = AggregationConfig::Equal(1, 3);
  const auto rows = TemperatureSweep(ds, cfg, grid, eval, FeatureSpec{});
  ASSERT_EQ(rows.size(), 1u);
  const auto record = Train(ds, cfg, FeatureSpec{});
  const auto e = EvaluateTest(ds, record.test.q, eval);
  EXPECT_NEAR(rows[0].perf, e.perf, 1e-12);
  EXPECT_NEAR(rows[0].fairness, e.fairness, 1e-12);
}

}  // namespace
}  // namespace hlvfair
