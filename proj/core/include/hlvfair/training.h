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

// Hashed bag-of-words linear classifier trained with one of five
// objectives:
//
//   MV    cross-entropy against majority-vote labels
//   ReL   cross-entropy on every (instance, annotation) pair
//   SL    cross-entropy against soft labels
//   JSD   Jensen-Shannon divergence against soft labels
//   SmF1  negated soft micro F1 of the mini-batch against soft labels
//
// Single-label tasks use a softmax output, multi-label tasks an element-wise
// sigmoid with per-class Bernoulli losses averaged over classes.

#ifndef HLVFAIR_TRAINING_H_
#define HLVFAIR_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hlvfair/aggregation.h"
#include "hlvfair/annotations.h"
#include "hlvfair/metrics.h"

namespace hlvfair {

enum class Method { kMV, kReL, kSL, kJSD, kSmF1 };

inline constexpr Method kAllMethods[] = {Method::kMV, Method::kReL,
                                         Method::kSL, Method::kJSD,
                                         Method::kSmF1};

std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);

// Clamp applied to probabilities inside logarithms.
inline constexpr double kProbabilityEpsilon = 1e-9;

struct FeatureSpec {
  std::size_t dimension = 32768;
};

// Sorted by index; values are L2-normalised term frequencies.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
};

// Lower-cased tokens split on whitespace and ASCII punctuation. Bytes of
// multi-byte UTF-8 sequences stay inside tokens.
std::vector<std::string> Tokenize(std::string_view text);

// Hashed term-frequency vector (FNV-1a modulo the dimension), L2-normalised.
// Empty or whitespace-only text gives the zero vector.
SparseVector Featurize(std::string_view text, const FeatureSpec& spec);

class Model {
 public:
  Model(TaskKind task, std::size_t num_classes, std::size_t dimension);

  TaskKind task() const { return task_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t dimension() const { return dimension_; }

  // Row-major K x D.
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& bias() { return bias_; }
  const std::vector<double>& bias() const { return bias_; }

  void Logits(const SparseVector& x, std::span<double> out) const;
  // Softmax or sigmoid of the logits.
  void Predict(const SparseVector& x, std::span<double> out) const;

 private:
  TaskKind task_;
  std::size_t num_classes_;
  std::size_t dimension_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Applies the output activation in place.
void Activate(TaskKind task, std::span<double> logits);

struct Example {
  SparseVector features;
  // Hard 0/1 targets for MV and ReL, soft labels otherwise.
  std::vector<double> target;
};

struct Gradient {
  std::vector<double> weights;  // K x D, row-major
  std::vector<double> bias;
};

struct LossAndGradient {
  double loss = 0.0;
  Gradient gradient;
};

// Batch loss (mean over examples; SmF1 is a ratio over the whole batch) and
// its exact gradient. The min in SmF1 passes gradient to its smaller
// argument, half to each on ties. Throws InvalidArgument for an empty batch
// or targets that do not suit the method, e.g. soft targets under MV.
LossAndGradient ComputeLossAndGradient(Method method, const Model& model,
                                       std::span<const Example> batch);

struct TrainConfig {
  Method method = Method::kMV;
  double learning_rate = 0.1;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;
  double tau = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Training examples for `cfg.method` built from the train split.
std::vector<Example> BuildExamples(const Dataset& dataset,
                                   const TrainConfig& cfg,
                                   const FeatureSpec& spec);

struct SplitPredictions {
  Split split = Split::kTest;
  std::vector<std::string> ids;
  LabelMatrix q;
};

struct RunRecord {
  Method method = Method::kMV;
  std::uint64_t seed = 0;
  TrainConfig config;
  FeatureSpec features;
  double final_train_loss = 0.0;
  SplitPredictions dev;
  SplitPredictions test;
};

// Mini-batch gradient descent from zero weights, examples reshuffled every
// epoch from the seed. Deterministic given (dataset, cfg, spec). Throws
// TrainingError on an empty train split or a non-finite loss.
RunRecord Train(const Dataset& dataset, const TrainConfig& cfg,
                const FeatureSpec& spec);

std::string RunRecordToJson(const RunRecord& record);
RunRecord RunRecordFromJson(std::string_view json_text);
void SaveRunRecord(const RunRecord& record, const std::filesystem::path& path);
RunRecord LoadRunRecord(const std::filesystem::path& path);

struct Evaluation {
  double perf = 0.0;      // soft micro F1
  double fairness = 0.0;  // aggregated fairness
  FairnessMatrix matrix;
};

// Scores test predictions against the tau = 1 soft labels of the test split.
Evaluation EvaluateTest(const Dataset& dataset, const LabelMatrix& q,
                        const AggregationConfig& eval_cfg);

struct TemperatureRow {
  double tau = 1.0;
  double perf = 0.0;
  double fairness = 0.0;
};

// Trains SL once per temperature (targets scaled on the train split only)
// and evaluates against ordinary tau = 1 test labels.
std::vector<TemperatureRow> TemperatureSweep(
    const Dataset& dataset, const TrainConfig& cfg,
    std::span<const double> grid, const AggregationConfig& eval_cfg,
    const FeatureSpec& spec = {});

}  // namespace hlvfair

#endif  // HLVFAIR_TRAINING_H_
