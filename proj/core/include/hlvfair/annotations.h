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

// Disaggregated multi-annotator datasets: schema, instances, JSONL I/O and
// the label-distribution constructions built on top of raw annotation counts
// (soft labels with temperature, majority vote, repeated labels) together
// with Krippendorff's alpha.

#ifndef HLVFAIR_ANNOTATIONS_H_
#define HLVFAIR_ANNOTATIONS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hlvfair {

enum class TaskKind { kSingleLabel, kMultiLabel };
enum class Membership { kIn, kOut, kUnknown };
enum class Split { kTrain, kDev, kTest };

std::string_view TaskKindName(TaskKind kind);
std::string_view SplitName(Split split);
// Throws InvalidArgument on unknown names.
Split ParseSplit(std::string_view name);
TaskKind ParseTaskKind(std::string_view name);

struct TaskSchema {
  TaskKind task = TaskKind::kSingleLabel;
  std::vector<std::string> classes;
  std::vector<std::string> groups;

  std::size_t num_classes() const { return classes.size(); }
  std::size_t num_groups() const { return groups.size(); }

  // Index of a class / group identifier, or nullopt when absent.
  std::optional<std::size_t> ClassIndex(std::string_view name) const;
  std::optional<std::size_t> GroupIndex(std::string_view name) const;

  // Throws InvalidArgument unless K >= 2, G >= 1 and identifiers are unique
  // and non-empty.
  void Validate() const;
};

// Schema file: {"task": "...", "classes": [...], "groups": [...]}.
TaskSchema LoadSchema(const std::filesystem::path& path);
TaskSchema ParseSchema(std::string_view json_text);
void WriteSchema(const TaskSchema& schema, std::ostream& out);

struct AnnotationRecord {
  std::optional<std::string> annotator;
  // Sorted, unique class indices.
  std::vector<std::size_t> labels;
};

struct Instance {
  std::string id;
  std::string text;
  std::vector<AnnotationRecord> annotations;
  // One entry per schema group.
  std::vector<Membership> membership;
  Split split = Split::kTrain;
};

struct Dataset {
  TaskSchema schema;
  std::vector<Instance> instances;
};

// Checks every Instance/Dataset invariant against the schema. Throws
// DatasetError naming the offending instance.
void ValidateDataset(const Dataset& dataset);

// Reads one instance per JSONL line. Missing membership keys default to
// out-group and a missing split to train. Errors carry the line number.
Dataset LoadDataset(const std::filesystem::path& path,
                    const TaskSchema& schema);
Dataset ParseDataset(std::istream& in, const TaskSchema& schema);

// Writes the JSONL form read by LoadDataset. Loading and re-writing the
// output reproduces it byte for byte.
void WriteDataset(const Dataset& dataset, std::ostream& out);
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);

// Positions of the instances belonging to `split`, in dataset order. Rows of
// a split's LabelMatrix follow this order.
std::vector<std::size_t> SplitIndices(const Dataset& dataset, Split split);

enum class LabelSemantics {
  kDistribution,  // rows on the probability simplex (single label)
  kMarginals,     // independent per-class probabilities (multi label)
};

LabelSemantics SemanticsFor(TaskKind kind);

// Dense row-major N x K matrix of probabilities. Holds both ground truths and
// model predictions.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::size_t cols, LabelSemantics semantics);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  LabelSemantics semantics() const { return semantics_; }

  double operator()(std::size_t i, std::size_t k) const {
    return values_[i * cols_ + k];
  }
  double& operator()(std::size_t i, std::size_t k) {
    return values_[i * cols_ + k];
  }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }
  const std::vector<double>& values() const { return values_; }

  // Throws InvalidArgument when an entry leaves [0, 1] or a distribution row
  // does not sum to 1 within 1e-9.
  void Validate() const;

  bool operator==(const LabelMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  LabelSemantics semantics_ = LabelSemantics::kDistribution;
  std::vector<double> values_;
};

// c_k: number of annotations that contain class k.
std::vector<int> ClassCounts(const Instance& instance, std::size_t num_classes);

// Temperature-scaled soft label. Single label: p_k ∝ c_k^(1/tau). Multi
// label: per class p_k = c_k^(1/tau) / (c_k^(1/tau) + (n - c_k)^(1/tau)).
// 0^(1/tau) is 0; tau = 1 gives plain annotation proportions.
std::vector<double> SoftDistribution(const Instance& instance,
                                     const TaskSchema& schema, double tau);

// Soft labels of every instance of `split`, rows in SplitIndices order.
LabelMatrix SoftLabels(const Dataset& dataset, Split split, double tau = 1.0);

// Single label: the most-voted class, lowest index on ties. Multi label: all
// classes chosen by a strict majority, falling back to the single most-voted
// class when none is.
std::vector<std::size_t> MajorityVote(const Instance& instance,
                                      const TaskSchema& schema);

struct RepeatedLabel {
  std::size_t instance;  // position in Dataset::instances
  std::string id;
  std::vector<std::size_t> labels;
};

// One pair per annotation of every train instance, instance order then
// annotation order.
std::vector<RepeatedLabel> RepeatedLabels(const Dataset& dataset);

enum class AgreementDistance { kNominal, kMasi };

// MASI distance between two label sets: 1 - jaccard * monotonicity.
double MasiDistance(std::span<const std::size_t> a,
                    std::span<const std::size_t> b);

// Krippendorff's alpha over all instances with at least two annotations.
// Returns nullopt when the expected disagreement is zero. Nominal distance
// requires a single-label task, MASI a multi-label one.
std::optional<double> KrippendorffAlpha(const Dataset& dataset,
                                        AgreementDistance distance);

}  // namespace hlvfair

#endif  // HLVFAIR_ANNOTATIONS_H_
