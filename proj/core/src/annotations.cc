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

#include "hlvfair/annotations.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "hlvfair/error.h"
#include "json.hpp"

namespace hlvfair {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view MembershipName(Membership m) {
  switch (m) {
    case Membership::kIn:
      return "in";
    case Membership::kOut:
      return "out";
    case Membership::kUnknown:
      return "unknown";
  }
  return "out";
}

std::optional<Membership> ParseMembership(std::string_view name) {
  if (name == "in") return Membership::kIn;
  if (name == "out") return Membership::kOut;
  if (name == "unknown") return Membership::kUnknown;
  return std::nullopt;
}

std::optional<std::size_t> IndexOf(const std::vector<std::string>& names,
                                   std::string_view name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

void CheckUnique(const std::vector<std::string>& names, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (name.empty()) {
      throw InvalidArgument(std::string("empty ") + what + " identifier");
    }
    if (!seen.insert(name).second) {
      throw InvalidArgument(std::string("duplicate ") + what +
                            " identifier: " + name);
    }
  }
}

Instance ParseInstance(const nlohmann::json& j, const TaskSchema& schema,
                       std::size_t line) {
  if (!j.is_object()) throw DatasetError("expected a JSON object", line);
  Instance inst;
  if (!j.contains("id") || !j["id"].is_string()) {
    throw DatasetError("missing string field \"id\"", line);
  }
  inst.id = j["id"].get<std::string>();
  if (j.contains("text")) {
    if (!j["text"].is_string()) {
      throw DatasetError("field \"text\" must be a string", line);
    }
    inst.text = j["text"].get<std::string>();
  }

  if (!j.contains("annotations") || !j["annotations"].is_array()) {
    throw DatasetError("missing array field \"annotations\"", line);
  }
  if (j["annotations"].empty()) {
    throw DatasetError("empty annotation list", line);
  }
  for (const auto& a : j["annotations"]) {
    if (!a.is_object() || !a.contains("labels") || !a["labels"].is_array()) {
      throw DatasetError("annotation without a \"labels\" array", line);
    }
    AnnotationRecord rec;
    if (a.contains("annotator") && !a["annotator"].is_null()) {
      if (!a["annotator"].is_string()) {
        throw DatasetError("\"annotator\" must be a string", line);
      }
      rec.annotator = a["annotator"].get<std::string>();
    }
    for (const auto& label : a["labels"]) {
      if (!label.is_string()) {
        throw DatasetError("class labels must be strings", line);
      }
      const auto name = label.get<std::string>();
      const auto k = schema.ClassIndex(name);
      if (!k) throw DatasetError("unknown class identifier: " + name, line);
      rec.labels.push_back(*k);
    }
    std::sort(rec.labels.begin(), rec.labels.end());
    rec.labels.erase(std::unique(rec.labels.begin(), rec.labels.end()),
                     rec.labels.end());
    if (rec.labels.empty()) {
      throw DatasetError("annotation with an empty label set", line);
    }
    if (schema.task == TaskKind::kSingleLabel && rec.labels.size() != 1) {
      throw DatasetError(
          "single_label task requires exactly one label per annotation", line);
    }
    inst.annotations.push_back(std::move(rec));
  }

  inst.membership.assign(schema.num_groups(), Membership::kOut);
  if (j.contains("groups")) {
    if (!j["groups"].is_object()) {
      throw DatasetError("field \"groups\" must be an object", line);
    }
    for (const auto& [name, value] : j["groups"].items()) {
      const auto g = schema.GroupIndex(name);
      if (!g) throw DatasetError("unknown group identifier: " + name, line);
      const auto m = value.is_string()
                         ? ParseMembership(value.get<std::string>())
                         : std::nullopt;
      if (!m) {
        throw DatasetError("membership of group " + name +
                               " must be \"in\", \"out\" or \"unknown\"",
                           line);
      }
      inst.membership[*g] = *m;
    }
  }

  if (j.contains("split")) {
    if (!j["split"].is_string()) {
      throw DatasetError("field \"split\" must be a string", line);
    }
    try {
      inst.split = ParseSplit(j["split"].get<std::string>());
    } catch (const InvalidArgument& e) {
      throw DatasetError(e.what(), line);
    }
  }
  return inst;
}

}  // namespace

std::string_view TaskKindName(TaskKind kind) {
  return kind == TaskKind::kSingleLabel ? "single_label" : "multi_label";
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw InvalidArgument("unknown split: " + std::string(name));
}

TaskKind ParseTaskKind(std::string_view name) {
  if (name == "single_label") return TaskKind::kSingleLabel;
  if (name == "multi_label") return TaskKind::kMultiLabel;
  throw InvalidArgument("unknown task kind: " + std::string(name));
}

std::optional<std::size_t> TaskSchema::ClassIndex(std::string_view name) const {
  return IndexOf(classes, name);
}

std::optional<std::size_t> TaskSchema::GroupIndex(std::string_view name) const {
  return IndexOf(groups, name);
}

void TaskSchema::Validate() const {
  if (classes.size() < 2) {
    throw InvalidArgument("schema needs at least two classes");
  }
  if (groups.empty()) throw InvalidArgument("schema needs at least one group");
  CheckUnique(classes, "class");
  CheckUnique(groups, "group");
}

TaskSchema ParseSchema(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("malformed schema JSON: ") + e.what());
  }
  TaskSchema schema;
  try {
    schema.task = ParseTaskKind(j.at("task").get<std::string>());
    schema.classes = j.at("classes").get<std::vector<std::string>>();
    schema.groups = j.at("groups").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid schema: ") + e.what());
  }
  schema.Validate();
  return schema;
}

TaskSchema LoadSchema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read schema file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSchema(buffer.str());
}

void WriteSchema(const TaskSchema& schema, std::ostream& out) {
  ordered_json j;
  j["task"] = TaskKindName(schema.task);
  j["classes"] = schema.classes;
  j["groups"] = schema.groups;
  out << j.dump(2) << '\n';
}

void ValidateDataset(const Dataset& dataset) {
  const auto& schema = dataset.schema;
  schema.Validate();
  std::unordered_set<std::string> ids;
  for (const auto& inst : dataset.instances) {
    if (!ids.insert(inst.id).second) {
      throw DatasetError("duplicate instance id: " + inst.id);
    }
    if (inst.annotations.empty()) {
      throw DatasetError("instance " + inst.id + ": empty annotation list");
    }
    if (inst.membership.size() != schema.num_groups()) {
      throw DatasetError("instance " + inst.id +
                         ": membership does not cover every group");
    }
    for (const auto& a : inst.annotations) {
      if (a.labels.empty()) {
        throw DatasetError("instance " + inst.id + ": empty label set");
      }
      if (schema.task == TaskKind::kSingleLabel && a.labels.size() != 1) {
        throw DatasetError("instance " + inst.id +
                           ": single_label annotation with several labels");
      }
      for (std::size_t i = 0; i < a.labels.size(); ++i) {
        if (a.labels[i] >= schema.num_classes()) {
          throw DatasetError("instance " + inst.id +
                             ": class index out of range");
        }
        if (i > 0 && a.labels[i] <= a.labels[i - 1]) {
          throw DatasetError("instance " + inst.id +
                             ": labels must be sorted and unique");
        }
      }
    }
  }
}

Dataset ParseDataset(std::istream& in, const TaskSchema& schema) {
  schema.Validate();
  Dataset dataset{schema, {}};
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    Instance inst = ParseInstance(j, schema, line_no);
    if (!ids.insert(inst.id).second) {
      throw DatasetError("duplicate instance id: " + inst.id, line_no);
    }
    dataset.instances.push_back(std::move(inst));
  }
  return dataset;
}

Dataset LoadDataset(const std::filesystem::path& path,
                    const TaskSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read dataset file " + path.string());
  return ParseDataset(in, schema);
}

void WriteDataset(const Dataset& dataset, std::ostream& out) {
  const auto& schema = dataset.schema;
  for (const auto& inst : dataset.instances) {
    ordered_json j;
    j["id"] = inst.id;
    j["text"] = inst.text;
    ordered_json annotations = ordered_json::array();
    for (const auto& a : inst.annotations) {
      ordered_json rec;
      if (a.annotator) rec["annotator"] = *a.annotator;
      ordered_json labels = ordered_json::array();
      for (const auto k : a.labels) labels.push_back(schema.classes[k]);
      rec["labels"] = std::move(labels);
      annotations.push_back(std::move(rec));
    }
    j["annotations"] = std::move(annotations);
    ordered_json groups = ordered_json::object();
    for (std::size_t g = 0; g < schema.num_groups(); ++g) {
      groups[schema.groups[g]] = MembershipName(inst.membership[g]);
    }
    j["groups"] = std::move(groups);
    j["split"] = SplitName(inst.split);
    out << j.dump() << '\n';
  }
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteDataset(dataset, out);
}

std::vector<std::size_t> SplitIndices(const Dataset& dataset, Split split) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    if (dataset.instances[i].split == split) out.push_back(i);
  }
  return out;
}

LabelSemantics SemanticsFor(TaskKind kind) {
  return kind == TaskKind::kSingleLabel ? LabelSemantics::kDistribution
                                        : LabelSemantics::kMarginals;
}

LabelMatrix::LabelMatrix(std::size_t rows, std::size_t cols,
                         LabelSemantics semantics)
    : rows_(rows), cols_(cols), semantics_(semantics),
      values_(rows * cols, 0.0) {}

void LabelMatrix::Validate() const {
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (const double v : row(i)) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InvalidArgument("label matrix entry outside [0, 1] in row " +
                              std::to_string(i));
      }
      sum += v;
    }
    if (semantics_ == LabelSemantics::kDistribution &&
        std::abs(sum - 1.0) > 1e-9) {
      throw InvalidArgument("distribution row " + std::to_string(i) +
                            " does not sum to 1");
    }
  }
}

std::vector<int> ClassCounts(const Instance& instance,
                             std::size_t num_classes) {
  std::vector<int> counts(num_classes, 0);
  for (const auto& a : instance.annotations) {
    for (const auto k : a.labels) ++counts.at(k);
  }
  return counts;
}

std::vector<double> SoftDistribution(const Instance& instance,
                                     const TaskSchema& schema, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("temperature must be positive");
  }
  if (instance.annotations.empty()) {
    throw InvalidArgument("instance " + instance.id + " has no annotations");
  }
  const std::size_t num_classes = schema.num_classes();
  const auto counts = ClassCounts(instance, num_classes);
  const double n = static_cast<double>(instance.annotations.size());
  std::vector<double> p(num_classes, 0.0);

  if (schema.task == TaskKind::kSingleLabel) {
    // Work with log(c_k) / tau so tiny temperatures do not overflow.
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < num_classes; ++k) {
      if (counts[k] > 0) max_log = std::max(max_log, std::log(counts[k]) / tau);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < num_classes; ++k) {
      if (counts[k] > 0) {
        p[k] = std::exp(std::log(counts[k]) / tau - max_log);
        total += p[k];
      }
    }
    for (auto& v : p) v /= total;
    return p;
  }

  for (std::size_t k = 0; k < num_classes; ++k) {
    const double c = counts[k];
    if (c == 0.0) {
      p[k] = 0.0;
    } else if (c == n) {
      p[k] = 1.0;
    } else {
      p[k] = 1.0 / (1.0 + std::exp((std::log(n - c) - std::log(c)) / tau));
    }
  }
  return p;
}

LabelMatrix SoftLabels(const Dataset& dataset, Split split, double tau) {
  const auto rows = SplitIndices(dataset, split);
  LabelMatrix m(rows.size(), dataset.schema.num_classes(),
                SemanticsFor(dataset.schema.task));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto p =
        SoftDistribution(dataset.instances[rows[r]], dataset.schema, tau);
    std::copy(p.begin(), p.end(), m.row(r).begin());
  }
  return m;
}

std::vector<std::size_t> MajorityVote(const Instance& instance,
                                      const TaskSchema& schema) {
  if (instance.annotations.empty()) {
    throw InvalidArgument("instance " + instance.id + " has no annotations");
  }
  const auto counts = ClassCounts(instance, schema.num_classes());
  // max_element returns the first maximum, i.e. the lowest index on ties.
  const auto most_voted = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  if (schema.task == TaskKind::kSingleLabel) return {most_voted};

  const auto n = static_cast<int>(instance.annotations.size());
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (2 * counts[k] > n) chosen.push_back(k);
  }
  if (chosen.empty()) chosen.push_back(most_voted);
  return chosen;
}

std::vector<RepeatedLabel> RepeatedLabels(const Dataset& dataset) {
  std::vector<RepeatedLabel> pairs;
  for (std::size_t i = 0; i < dataset.instances.size(); ++i) {
    const auto& inst = dataset.instances[i];
    if (inst.split != Split::kTrain) continue;
    for (const auto& a : inst.annotations) {
      pairs.push_back({i, inst.id, a.labels});
    }
  }
  return pairs;
}

double MasiDistance(std::span<const std::size_t> a,
                    std::span<const std::size_t> b) {
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  const std::size_t inter = common.size();
  const std::size_t uni = a.size() + b.size() - inter;
  if (uni == 0) return 0.0;
  const double jaccard = static_cast<double>(inter) / uni;
  double monotonicity;
  if (a.size() == b.size() && inter == a.size()) {
    monotonicity = 1.0;
  } else if (inter == a.size() || inter == b.size()) {
    monotonicity = 2.0 / 3.0;
  } else if (inter > 0) {
    monotonicity = 1.0 / 3.0;
  } else {
    monotonicity = 0.0;
  }
  return 1.0 - jaccard * monotonicity;
}

std::optional<double> KrippendorffAlpha(const Dataset& dataset,
                                        AgreementDistance distance) {
  const TaskKind task = dataset.schema.task;
  if (distance == AgreementDistance::kNominal &&
      task != TaskKind::kSingleLabel) {
    throw InvalidArgument("nominal distance requires a single_label task");
  }
  if (distance == AgreementDistance::kMasi && task != TaskKind::kMultiLabel) {
    throw InvalidArgument("MASI distance requires a multi_label task");
  }
  using Value = std::vector<std::size_t>;
  const auto delta = [distance](const Value& a, const Value& b) {
    if (distance == AgreementDistance::kNominal) return a == b ? 0.0 : 1.0;
    return MasiDistance(a, b);
  };

  std::size_t units = 0;
  double pairable = 0.0;
  double observed = 0.0;
  std::map<Value, double> pooled;
  for (const auto& inst : dataset.instances) {
    const std::size_t m = inst.annotations.size();
    if (m < 2) continue;
    ++units;
    pairable += static_cast<double>(m);
    double within = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      pooled[inst.annotations[a].labels] += 1.0;
      for (std::size_t b = 0; b < m; ++b) {
        if (a != b) {
          within +=
              delta(inst.annotations[a].labels, inst.annotations[b].labels);
        }
      }
    }
    observed += within / static_cast<double>(m - 1);
  }
  if (units < 2) {
    throw InvalidArgument(
        "Krippendorff's alpha needs at least two instances with two or more "
        "annotations");
  }
  observed /= pairable;

  double expected = 0.0;
  for (const auto& [va, na] : pooled) {
    for (const auto& [vb, nb] : pooled) {
      if (va != vb) expected += na * nb * delta(va, vb);
    }
  }
  expected /= pairable * (pairable - 1.0);
  if (expected == 0.0) return std::nullopt;
  return 1.0 - observed / expected;
}

}  // namespace hlvfair
