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

// Soft F1 metrics over probability matrices and class x group fairness
// scores.
//
// Every function addresses instances by row position inside the split's
// LabelMatrix (see SplitIndices). Row lists may contain repeats, in which
// case a row counts once per occurrence; the bootstrap relies on this.

#ifndef HLVFAIR_METRICS_H_
#define HLVFAIR_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hlvfair/annotations.h"

namespace hlvfair {

// 2 * sum min(P_ik, Q_ik) / sum (P_ik + Q_ik) over `rows` for class k.
// Zero when the denominator is zero.
double SoftF1Class(const LabelMatrix& p, const LabelMatrix& q, std::size_t k,
                   std::span<const std::size_t> rows);

// As SoftF1Class but pooled over all classes.
double SoftMicroF1(const LabelMatrix& p, const LabelMatrix& q,
                   std::span<const std::size_t> rows);
double SoftMicroF1(const LabelMatrix& p, const LabelMatrix& q);

// min(f0, f1) / max(f0, f1), and 1 when both are zero.
double FairnessScore(double f0, double f1);

struct SubsetPair {
  std::size_t group = 0;
  // Row positions within the split, ascending. Unknown membership is in
  // neither list.
  std::vector<std::size_t> in_rows;
  std::vector<std::size_t> out_rows;
  std::vector<std::string> in_ids;
  std::vector<std::string> out_ids;
};

// One SubsetPair per schema group over the instances of `split`.
std::vector<SubsetPair> PartitionSubsets(const Dataset& dataset, Split split);

// Row-major N x G membership of a split, the form the fast fairness
// computation consumes.
class MembershipTable {
 public:
  MembershipTable() = default;
  MembershipTable(const Dataset& dataset, Split split);

  std::size_t rows() const { return rows_; }
  std::size_t groups() const { return groups_; }
  Membership operator()(std::size_t row, std::size_t g) const {
    return cells_[row * groups_ + g];
  }

 private:
  std::size_t rows_ = 0;
  std::size_t groups_ = 0;
  std::vector<Membership> cells_;
};

// K x G fairness scores with the in-group (F^1) and out-of-group (F^0) soft
// F1 values they came from. Cells whose in- or out-subset is empty carry
// F = 0 for that side and a raised flag.
struct FairnessMatrix {
  std::size_t num_classes = 0;
  std::size_t num_groups = 0;
  std::vector<double> s;
  std::vector<double> f_in;
  std::vector<double> f_out;
  std::vector<std::uint8_t> flags;

  FairnessMatrix() = default;
  FairnessMatrix(std::size_t k, std::size_t g)
      : num_classes(k), num_groups(g), s(k * g, 1.0), f_in(k * g, 0.0),
        f_out(k * g, 0.0), flags(k * g, 0) {}

  std::size_t index(std::size_t k, std::size_t g) const {
    return k * num_groups + g;
  }
  double score(std::size_t k, std::size_t g) const { return s[index(k, g)]; }
  bool flagged(std::size_t k, std::size_t g) const {
    return flags[index(k, g)] != 0;
  }
};

// Fairness over the instances listed in `rows` (repeats allowed), with
// membership looked up in `membership`.
FairnessMatrix ComputeFairnessMatrix(const LabelMatrix& p, const LabelMatrix& q,
                                     const MembershipTable& membership,
                                     std::span<const std::size_t> rows);

// Fairness over every instance of `split`. `p` and `q` hold that split's rows.
FairnessMatrix ComputeFairnessMatrix(const LabelMatrix& p, const LabelMatrix& q,
                                     const Dataset& dataset, Split split);

// {"s": [[...]], "f_in": [[...]], "f_out": [[...]], "flags": [[...]]},
// class-major.
std::string FairnessMatrixToJson(const FairnessMatrix& fm);
FairnessMatrix FairnessMatrixFromJson(std::string_view json_text);

}  // namespace hlvfair

#endif  // HLVFAIR_METRICS_H_
