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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "hlvfair/error.h"
#include "hlvfair/random.h"
#include "json.hpp"

namespace hlvfair {
namespace {

constexpr double kEps = kProbabilityEpsilon;

double SafeLog(double x) { return std::log(std::max(x, kEps)); }

// d/dx of SafeLog(x): zero where the clamp is active.
double SafeLogGrad(double x) { return x > kEps ? 1.0 / x : 0.0; }

// a * ln(a / m) with the 0 ln 0 = 0 convention.
double KlTerm(double a, double m) {
  return a > 0.0 ? a * (SafeLog(a) - SafeLog(m)) : 0.0;
}

// Two-outcome or K-outcome Jensen-Shannon divergence pieces.
double JsdTerm(double p, double q) {
  const double m = 0.5 * (p + q);
  return 0.5 * (KlTerm(p, m) + KlTerm(q, m));
}
double JsdTermGrad(double p, double q) {
  // d/dq [JsdTerm]; the mixture terms cancel to 0.5 * ln(q / m).
  const double m = 0.5 * (p + q);
  return 0.5 * (SafeLog(q) - SafeLog(m));
}

bool IsHardMethod(Method m) { return m == Method::kMV || m == Method::kReL; }

void CheckTarget(Method method, TaskKind task, std::span<const double> target,
                 std::size_t num_classes) {
  if (target.size() != num_classes) {
    throw InvalidArgument("target width does not match the model");
  }
  double sum = 0.0;
  for (const double t : target) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw InvalidArgument("target entries must lie in [0, 1]");
    }
    if (IsHardMethod(method) && t != 0.0 && t != 1.0) {
      throw InvalidArgument(std::string(MethodName(method)) +
                            " requires hard 0/1 targets");
    }
    sum += t;
  }
  if (task == TaskKind::kSingleLabel && std::abs(sum - 1.0) > 1e-9) {
    throw InvalidArgument("single_label targets must sum to 1");
  }
  if (task == TaskKind::kMultiLabel && IsHardMethod(method) && sum == 0.0) {
    throw InvalidArgument("hard multi_label targets need a positive class");
  }
}

// Per-example loss and dL/dq for the cross-entropy and JSD objectives.
double ExampleLoss(Method method, TaskKind task, std::span<const double> p,
                   std::span<const double> q, std::span<double> dq) {
  const std::size_t k_count = p.size();
  double loss = 0.0;
  if (task == TaskKind::kSingleLabel) {
    for (std::size_t k = 0; k < k_count; ++k) {
      if (method == Method::kJSD) {
        loss += JsdTerm(p[k], q[k]);
        dq[k] = JsdTermGrad(p[k], q[k]);
      } else {
        loss -= p[k] * SafeLog(q[k]);
        dq[k] = -p[k] * SafeLogGrad(q[k]);
      }
    }
    return loss;
  }
  const double scale = 1.0 / static_cast<double>(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    if (method == Method::kJSD) {
      loss += scale * (JsdTerm(p[k], q[k]) + JsdTerm(1.0 - p[k], 1.0 - q[k]));
      dq[k] = scale * (JsdTermGrad(p[k], q[k]) -
                       JsdTermGrad(1.0 - p[k], 1.0 - q[k]));
    } else {
      loss -= scale * (p[k] * SafeLog(q[k]) + (1.0 - p[k]) * SafeLog(1.0 - q[k]));
      dq[k] = -scale * (p[k] * SafeLogGrad(q[k]) -
                        (1.0 - p[k]) * SafeLogGrad(1.0 - q[k]));
    }
  }
  return loss;
}

// Chains dL/dq through the output activation into dL/dz, in place.
void BackThroughActivation(TaskKind task, std::span<const double> q,
                           std::span<double> grad) {
  if (task == TaskKind::kSingleLabel) {
    double dot = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) dot += q[k] * grad[k];
    for (std::size_t k = 0; k < q.size(); ++k) {
      grad[k] = q[k] * (grad[k] - dot);
    }
  } else {
    for (std::size_t k = 0; k < q.size(); ++k) {
      grad[k] *= q[k] * (1.0 - q[k]);
    }
  }
}

// Batch loss; fills `dz` (B x K, row-major) with its gradient w.r.t. the
// logits of every example.
double LogitGradients(Method method, const Model& model,
                      std::span<const Example> batch, std::vector<double>& dz) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  const std::size_t num_classes = model.num_classes();
  const TaskKind task = model.task();
  std::vector<double> q(batch.size() * num_classes);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CheckTarget(method, task, batch[i].target, num_classes);
    model.Predict(batch[i].features, {q.data() + i * num_classes, num_classes});
  }
  dz.assign(batch.size() * num_classes, 0.0);

  double loss = 0.0;
  if (method == Method::kSmF1) {
    double overlap = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      for (std::size_t k = 0; k < num_classes; ++k) {
        const double p = batch[i].target[k];
        const double qk = q[i * num_classes + k];
        overlap += std::min(p, qk);
        total += p + qk;
      }
    }
    if (total <= 0.0) return 0.0;
    loss = -2.0 * overlap / total;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      for (std::size_t k = 0; k < num_classes; ++k) {
        const double p = batch[i].target[k];
        const double qk = q[i * num_classes + k];
        const double dmin = qk < p ? 1.0 : (qk > p ? 0.0 : 0.5);
        dz[i * num_classes + k] =
            -2.0 * (dmin * total - overlap) / (total * total);
      }
    }
  } else {
    const double scale = 1.0 / static_cast<double>(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      std::span<double> dq(dz.data() + i * num_classes, num_classes);
      loss += scale * ExampleLoss(method, task, batch[i].target,
                                  {q.data() + i * num_classes, num_classes},
                                  dq);
      for (auto& g : dq) g *= scale;
    }
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    BackThroughActivation(task, {q.data() + i * num_classes, num_classes},
                          {dz.data() + i * num_classes, num_classes});
  }
  return loss;
}

std::vector<double> OneHot(std::span<const std::size_t> labels,
                           std::size_t num_classes) {
  std::vector<double> t(num_classes, 0.0);
  for (const auto k : labels) t[k] = 1.0;
  return t;
}

SplitPredictions PredictSplit(const Dataset& dataset, Split split,
                              const Model& model, const FeatureSpec& spec) {
  SplitPredictions out;
  out.split = split;
  const auto rows = SplitIndices(dataset, split);
  out.q = LabelMatrix(rows.size(), model.num_classes(),
                      SemanticsFor(model.task()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& inst = dataset.instances[rows[r]];
    out.ids.push_back(inst.id);
    model.Predict(Featurize(inst.text, spec), out.q.row(r));
  }
  return out;
}

nlohmann::ordered_json PredictionsToJson(const SplitPredictions& p) {
  nlohmann::ordered_json j;
  j["split"] = SplitName(p.split);
  j["semantics"] = p.q.semantics() == LabelSemantics::kDistribution
                       ? "distribution"
                       : "marginals";
  j["ids"] = p.ids;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < p.q.rows(); ++i) {
    const auto row = p.q.row(i);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["q"] = std::move(rows);
  return j;
}

SplitPredictions PredictionsFromJson(const nlohmann::json& j,
                                     std::size_t num_classes) {
  SplitPredictions p;
  p.split = ParseSplit(j.at("split").get<std::string>());
  const auto semantics = j.at("semantics").get<std::string>() == "marginals"
                             ? LabelSemantics::kMarginals
                             : LabelSemantics::kDistribution;
  p.ids = j.at("ids").get<std::vector<std::string>>();
  const auto rows = j.at("q").get<std::vector<std::vector<double>>>();
  if (rows.size() != p.ids.size()) {
    throw InvalidArgument("prediction rows do not match ids");
  }
  p.q = LabelMatrix(rows.size(), num_classes, semantics);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != num_classes) {
      throw InvalidArgument("prediction row width mismatch");
    }
    std::copy(rows[i].begin(), rows[i].end(), p.q.row(i).begin());
  }
  return p;
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kMV:
      return "MV";
    case Method::kReL:
      return "ReL";
    case Method::kSL:
      return "SL";
    case Method::kJSD:
      return "JSD";
    case Method::kSmF1:
      return "SmF1";
  }
  return "MV";
}

Method ParseMethod(std::string_view name) {
  for (const auto m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  throw InvalidArgument("unknown training method: " + std::string(name));
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && (std::isspace(c) || std::ispunct(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

SparseVector Featurize(std::string_view text, const FeatureSpec& spec) {
  if (spec.dimension == 0) throw InvalidArgument("feature dimension is zero");
  std::map<std::uint32_t, double> counts;
  for (const auto& token : Tokenize(text)) {
    counts[static_cast<std::uint32_t>(StableHash(token) % spec.dimension)] +=
        1.0;
  }
  SparseVector x;
  double norm = 0.0;
  for (const auto& [index, count] : counts) {
    x.indices.push_back(index);
    x.values.push_back(count);
    norm += count * count;
  }
  norm = std::sqrt(norm);
  for (auto& v : x.values) v /= norm;
  return x;
}

Model::Model(TaskKind task, std::size_t num_classes, std::size_t dimension)
    : task_(task), num_classes_(num_classes), dimension_(dimension),
      weights_(num_classes * dimension, 0.0), bias_(num_classes, 0.0) {
  if (num_classes < 2 || dimension == 0) {
    throw InvalidArgument("model needs at least two classes and a dimension");
  }
}

void Model::Logits(const SparseVector& x, std::span<double> out) const {
  for (std::size_t k = 0; k < num_classes_; ++k) {
    const double* w = weights_.data() + k * dimension_;
    double z = bias_[k];
    for (std::size_t j = 0; j < x.indices.size(); ++j) {
      z += w[x.indices[j]] * x.values[j];
    }
    out[k] = z;
  }
}

void Model::Predict(const SparseVector& x, std::span<double> out) const {
  Logits(x, out);
  Activate(task_, out);
}

void Activate(TaskKind task, std::span<double> logits) {
  if (task == TaskKind::kSingleLabel) {
    const double max = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (auto& z : logits) {
      z = std::exp(z - max);
      total += z;
    }
    for (auto& z : logits) z /= total;
    return;
  }
  for (auto& z : logits) {
    if (z >= 0.0) {
      z = 1.0 / (1.0 + std::exp(-z));
    } else {
      const double e = std::exp(z);
      z = e / (1.0 + e);
    }
  }
}

LossAndGradient ComputeLossAndGradient(Method method, const Model& model,
                                       std::span<const Example> batch) {
  std::vector<double> dz;
  LossAndGradient out;
  out.loss = LogitGradients(method, model, batch, dz);
  const std::size_t num_classes = model.num_classes();
  const std::size_t dimension = model.dimension();
  out.gradient.weights.assign(num_classes * dimension, 0.0);
  out.gradient.bias.assign(num_classes, 0.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& x = batch[i].features;
    for (std::size_t k = 0; k < num_classes; ++k) {
      const double g = dz[i * num_classes + k];
      out.gradient.bias[k] += g;
      for (std::size_t j = 0; j < x.indices.size(); ++j) {
        out.gradient.weights[k * dimension + x.indices[j]] += g * x.values[j];
      }
    }
  }
  return out;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning rate must be positive");
  }
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  if (epochs == 0) throw InvalidArgument("epochs must be positive");
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("temperature must be positive");
  }
}

std::vector<Example> BuildExamples(const Dataset& dataset,
                                   const TrainConfig& cfg,
                                   const FeatureSpec& spec) {
  const auto& schema = dataset.schema;
  const std::size_t num_classes = schema.num_classes();
  std::vector<Example> examples;
  if (cfg.method == Method::kReL) {
    const auto pairs = RepeatedLabels(dataset);
    // Featurize each instance once and reuse it across its annotations.
    std::size_t last = dataset.instances.size();
    SparseVector features;
    for (const auto& pair : pairs) {
      if (pair.instance != last) {
        features = Featurize(dataset.instances[pair.instance].text, spec);
        last = pair.instance;
      }
      examples.push_back({features, OneHot(pair.labels, num_classes)});
    }
    return examples;
  }
  for (const auto i : SplitIndices(dataset, Split::kTrain)) {
    const auto& inst = dataset.instances[i];
    std::vector<double> target =
        cfg.method == Method::kMV
            ? OneHot(MajorityVote(inst, schema), num_classes)
            : SoftDistribution(inst, schema, cfg.tau);
    examples.push_back({Featurize(inst.text, spec), std::move(target)});
  }
  return examples;
}

RunRecord Train(const Dataset& dataset, const TrainConfig& cfg,
                const FeatureSpec& spec) {
  cfg.Validate();
  const auto examples = BuildExamples(dataset, cfg, spec);
  if (examples.empty()) throw TrainingError("empty train split");

  Model model(dataset.schema.task, dataset.schema.num_classes(),
              spec.dimension);
  const std::size_t num_classes = model.num_classes();
  const std::size_t dimension = model.dimension();
  const double output_scale =
      model.task() == TaskKind::kMultiLabel && cfg.method != Method::kSmF1
          ? static_cast<double>(num_classes)
          : 1.0;
  Rng rng(DeriveSeed(cfg.seed, "train.shuffle"));
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Example> batch;
  std::vector<double> dz;
  double last_epoch_loss = 0.0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(examples[order[i]]);
      }
      const double loss = LogitGradients(cfg.method, model, batch, dz);
      if (!std::isfinite(loss)) {
        throw TrainingError("non-finite loss at epoch " +
                            std::to_string(epoch + 1) + ", batch " +
                            std::to_string(batches + 1) +
                            "; lower the learning rate");
      }
      epoch_loss += loss;
      ++batches;
      // The learning rate is per example and per output: the step is
      // lr * |batch| (* K for the class-averaged multi_label losses) times
      // the gradient of the batch loss. That gradient is a sum over
      // examples, so applying each example's logit gradient after all of
      // them were computed is one exact step.
      const double rate = cfg.learning_rate *
                          static_cast<double>(batch.size()) * output_scale;
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& x = batch[i].features;
        for (std::size_t k = 0; k < num_classes; ++k) {
          const double step = rate * dz[i * num_classes + k];
          if (step == 0.0) continue;
          model.bias()[k] -= step;
          double* w = model.weights().data() + k * dimension;
          for (std::size_t j = 0; j < x.indices.size(); ++j) {
            w[x.indices[j]] -= step * x.values[j];
          }
        }
      }
    }
    last_epoch_loss = epoch_loss / static_cast<double>(batches);
  }

  RunRecord record;
  record.method = cfg.method;
  record.seed = cfg.seed;
  record.config = cfg;
  record.features = spec;
  record.final_train_loss = last_epoch_loss;
  record.dev = PredictSplit(dataset, Split::kDev, model, spec);
  record.test = PredictSplit(dataset, Split::kTest, model, spec);
  return record;
}

std::string RunRecordToJson(const RunRecord& record) {
  nlohmann::ordered_json j;
  j["method"] = MethodName(record.method);
  j["seed"] = record.seed;
  nlohmann::ordered_json config;
  config["learning_rate"] = record.config.learning_rate;
  config["batch_size"] = record.config.batch_size;
  config["epochs"] = record.config.epochs;
  config["tau"] = record.config.tau;
  config["dimension"] = record.features.dimension;
  j["config"] = std::move(config);
  j["final_train_loss"] = record.final_train_loss;
  j["predictions"] = nlohmann::ordered_json::array(
      {PredictionsToJson(record.dev), PredictionsToJson(record.test)});
  return j.dump();
}

RunRecord RunRecordFromJson(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    RunRecord r;
    r.method = ParseMethod(j.at("method").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("config");
    r.config.method = r.method;
    r.config.seed = r.seed;
    r.config.learning_rate = c.at("learning_rate").get<double>();
    r.config.batch_size = c.at("batch_size").get<std::size_t>();
    r.config.epochs = c.at("epochs").get<std::size_t>();
    r.config.tau = c.at("tau").get<double>();
    r.features.dimension = c.at("dimension").get<std::size_t>();
    r.final_train_loss = j.at("final_train_loss").get<double>();
    const auto& preds = j.at("predictions");
    std::size_t num_classes = 0;
    for (const auto& p : preds) {
      const auto& q = p.at("q");
      if (!q.empty()) num_classes = q.front().size();
    }
    for (const auto& p : preds) {
      auto split = PredictionsFromJson(p, num_classes);
      (split.split == Split::kDev ? r.dev : r.test) = std::move(split);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid run record: ") + e.what());
  }
}

void SaveRunRecord(const RunRecord& record,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << RunRecordToJson(record) << '\n';
}

RunRecord LoadRunRecord(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read run record " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return RunRecordFromJson(buffer.str());
}

Evaluation EvaluateTest(const Dataset& dataset, const LabelMatrix& q,
                        const AggregationConfig& eval_cfg) {
  const LabelMatrix truth = SoftLabels(dataset, Split::kTest, 1.0);
  if (truth.rows() == 0) throw InvalidArgument("empty test split");
  Evaluation e;
  e.perf = SoftMicroF1(truth, q);
  e.matrix = ComputeFairnessMatrix(truth, q, dataset, Split::kTest);
  e.fairness = Aggregate(e.matrix, eval_cfg);
  return e;
}

std::vector<TemperatureRow> TemperatureSweep(
    const Dataset& dataset, const TrainConfig& cfg,
    std::span<const double> grid, const AggregationConfig& eval_cfg,
    const FeatureSpec& spec) {
  if (cfg.method != Method::kSL) {
    throw InvalidArgument("temperature sweeps apply to SL only");
  }
  for (const double tau : grid) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw InvalidArgument("temperatures must be positive");
    }
  }
  std::vector<TemperatureRow> rows;
  for (const double tau : grid) {
    TrainConfig scaled = cfg;
    scaled.tau = tau;
    const auto record = Train(dataset, scaled, spec);
    const auto eval = EvaluateTest(dataset, record.test.q, eval_cfg);
    rows.push_back({tau, eval.perf, eval.fairness});
  }
  return rows;
}

}  // namespace hlvfair
