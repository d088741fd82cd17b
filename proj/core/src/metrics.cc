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

#include <algorithm>
#include <numeric>

#include "hlvfair/error.h"
#include "json.hpp"

namespace hlvfair {
namespace {

void CheckShapes(const LabelMatrix& p, const LabelMatrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols() ||
      p.semantics() != q.semantics()) {
    throw InvalidArgument("label matrices differ in shape or semantics");
  }
}

void CheckRows(const LabelMatrix& p, std::span<const std::size_t> rows) {
  if (rows.empty()) throw InvalidArgument("empty instance subset");
  for (const auto r : rows) {
    if (r >= p.rows()) throw InvalidArgument("row index out of range");
  }
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

double SoftF1Class(const LabelMatrix& p, const LabelMatrix& q, std::size_t k,
                   std::span<const std::size_t> rows) {
  CheckShapes(p, q);
  CheckRows(p, rows);
  if (k >= p.cols()) throw InvalidArgument("class index out of range");
  double overlap = 0.0;
  double total = 0.0;
  for (const auto i : rows) {
    overlap += std::min(p(i, k), q(i, k));
    total += p(i, k) + q(i, k);
  }
  return total > 0.0 ? 2.0 * overlap / total : 0.0;
}

double SoftMicroF1(const LabelMatrix& p, const LabelMatrix& q,
                   std::span<const std::size_t> rows) {
  CheckShapes(p, q);
  CheckRows(p, rows);
  double overlap = 0.0;
  double total = 0.0;
  for (const auto i : rows) {
    for (std::size_t k = 0; k < p.cols(); ++k) {
      overlap += std::min(p(i, k), q(i, k));
      total += p(i, k) + q(i, k);
    }
  }
  return total > 0.0 ? 2.0 * overlap / total : 0.0;
}

double SoftMicroF1(const LabelMatrix& p, const LabelMatrix& q) {
  return SoftMicroF1(p, q, AllRows(p.rows()));
}

double FairnessScore(double f0, double f1) {
  if (!(f0 >= 0.0 && f0 <= 1.0 && f1 >= 0.0 && f1 <= 1.0)) {
    throw InvalidArgument("subset performances must lie in [0, 1]");
  }
  if (f0 == 0.0 && f1 == 0.0) return 1.0;
  return std::min(f0, f1) / std::max(f0, f1);
}

std::vector<SubsetPair> PartitionSubsets(const Dataset& dataset, Split split) {
  const auto indices = SplitIndices(dataset, split);
  std::vector<SubsetPair> pairs(dataset.schema.num_groups());
  for (std::size_t g = 0; g < pairs.size(); ++g) {
    auto& pair = pairs[g];
    pair.group = g;
    for (std::size_t r = 0; r < indices.size(); ++r) {
      const auto& inst = dataset.instances[indices[r]];
      switch (inst.membership[g]) {
        case Membership::kIn:
          pair.in_rows.push_back(r);
          pair.in_ids.push_back(inst.id);
          break;
        case Membership::kOut:
          pair.out_rows.push_back(r);
          pair.out_ids.push_back(inst.id);
          break;
        case Membership::kUnknown:
          break;
      }
    }
  }
  return pairs;
}

MembershipTable::MembershipTable(const Dataset& dataset, Split split)
    : groups_(dataset.schema.num_groups()) {
  for (const auto i : SplitIndices(dataset, split)) {
    const auto& m = dataset.instances[i].membership;
    cells_.insert(cells_.end(), m.begin(), m.end());
    ++rows_;
  }
}

FairnessMatrix ComputeFairnessMatrix(const LabelMatrix& p, const LabelMatrix& q,
                                     const MembershipTable& membership,
                                     std::span<const std::size_t> rows) {
  CheckShapes(p, q);
  if (membership.rows() != p.rows()) {
    throw InvalidArgument("membership table does not match the label matrix");
  }
  const std::size_t num_classes = p.cols();
  const std::size_t num_groups = membership.groups();
  const std::size_t cells = num_classes * num_groups;
  // Sums are accumulated in row order per cell, matching SoftF1Class over the
  // same subset bit for bit.
  std::vector<double> overlap_in(cells, 0.0), total_in(cells, 0.0);
  std::vector<double> overlap_out(cells, 0.0), total_out(cells, 0.0);
  std::vector<std::size_t> count_in(num_groups, 0), count_out(num_groups, 0);

  for (const auto r : rows) {
    if (r >= p.rows()) throw InvalidArgument("row index out of range");
    for (std::size_t g = 0; g < num_groups; ++g) {
      const Membership m = membership(r, g);
      if (m == Membership::kUnknown) continue;
      const bool in = m == Membership::kIn;
      ++(in ? count_in : count_out)[g];
      auto& overlap = in ? overlap_in : overlap_out;
      auto& total = in ? total_in : total_out;
      for (std::size_t k = 0; k < num_classes; ++k) {
        const double pk = p(r, k);
        const double qk = q(r, k);
        const std::size_t c = k * num_groups + g;
        overlap[c] += std::min(pk, qk);
        total[c] += pk + qk;
      }
    }
  }

  FairnessMatrix fm(num_classes, num_groups);
  for (std::size_t k = 0; k < num_classes; ++k) {
    for (std::size_t g = 0; g < num_groups; ++g) {
      const std::size_t c = fm.index(k, g);
      fm.f_in[c] = total_in[c] > 0.0 ? 2.0 * overlap_in[c] / total_in[c] : 0.0;
      fm.f_out[c] =
          total_out[c] > 0.0 ? 2.0 * overlap_out[c] / total_out[c] : 0.0;
      fm.flags[c] = count_in[g] == 0 || count_out[g] == 0;
      fm.s[c] = FairnessScore(fm.f_out[c], fm.f_in[c]);
    }
  }
  return fm;
}

FairnessMatrix ComputeFairnessMatrix(const LabelMatrix& p, const LabelMatrix& q,
                                     const Dataset& dataset, Split split) {
  const MembershipTable membership(dataset, split);
  return ComputeFairnessMatrix(p, q, membership, AllRows(p.rows()));
}

std::string FairnessMatrixToJson(const FairnessMatrix& fm) {
  nlohmann::ordered_json j;
  auto grid = [&fm](const auto& cells) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < fm.num_classes; ++k) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t g = 0; g < fm.num_groups; ++g) {
        row.push_back(cells[fm.index(k, g)]);
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["s"] = grid(fm.s);
  j["f_in"] = grid(fm.f_in);
  j["f_out"] = grid(fm.f_out);
  std::vector<bool> flags(fm.flags.begin(), fm.flags.end());
  j["flags"] = grid(flags);
  return j.dump();
}

FairnessMatrix FairnessMatrixFromJson(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    const auto s = j.at("s").get<std::vector<std::vector<double>>>();
    const std::size_t num_classes = s.size();
    const std::size_t num_groups = s.empty() ? 0 : s.front().size();
    FairnessMatrix fm(num_classes, num_groups);
    const auto f_in = j.at("f_in").get<std::vector<std::vector<double>>>();
    const auto f_out = j.at("f_out").get<std::vector<std::vector<double>>>();
    const auto flags = j.at("flags").get<std::vector<std::vector<bool>>>();
    for (std::size_t k = 0; k < num_classes; ++k) {
      for (std::size_t g = 0; g < num_groups; ++g) {
        const auto c = fm.index(k, g);
        fm.s[c] = s.at(k).at(g);
        fm.f_in[c] = f_in.at(k).at(g);
        fm.f_out[c] = f_out.at(k).at(g);
        fm.flags[c] = flags.at(k).at(g);
      }
    }
    return fm;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid fairness matrix JSON: ") +
                          e.what());
  }
}

}  // namespace hlvfair
