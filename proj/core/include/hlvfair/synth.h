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

// Synthetic multi-label annotation data in which a rare class is visible
// only to a few specialist annotators and co-occurs with one group.
//
// Generative process, per instance:
//   * membership of every group: unknown with `unknown_rate`, otherwise in
//     with `membership_rate`;
//   * a primary class drawn uniformly from the non-rare classes, plus one
//     extra non-rare secondary class with `secondary_rate`;
//   * the rare class is true with `rare_base_rate`, raised to
//     base + rho * (1 - base) for members of the correlated group;
//   * text: `tokens_per_label` tokens from the vocabulary of the primary
//     and the rare class, the same number from a separate secondary-aspect
//     vocabulary of the secondary class, and `background_tokens` shared
//     tokens;
//   * `annotators_per_instance` distinct annotators from a fixed pool. An
//     annotator specialised in the rare class (pool frequency per class from
//     `specialisation_rarity`) reports it, when true, in place of the
//     primary class; everyone else marks the primary class. A secondary
//     class is marked only by its specialists. With `label_noise` an
//     annotator adds a random non-rare class.
// Splits are assigned 8:1:1 from a seeded permutation.

#ifndef HLVFAIR_SYNTH_H_
#define HLVFAIR_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hlvfair/annotations.h"

namespace hlvfair {

struct SynthConfig {
  std::size_t n_instances = 2000;
  std::size_t num_classes = 8;
  std::size_t num_groups = 4;
  std::size_t annotators_per_instance = 5;
  std::size_t pool_size = 40;
  std::size_t vocab_size = 5;
  std::size_t tokens_per_label = 4;
  std::size_t background_tokens = 2;
  // Per-class fraction of the pool specialised in the class. Empty means
  // 0.3 for every class.
  std::vector<double> specialisation_rarity;
  std::size_t rare_class = 7;
  std::size_t correlated_group = 0;
  double group_correlation = 0.8;
  double rare_base_rate = 0.05;
  double membership_rate = 0.3;
  double unknown_rate = 0.02;
  double secondary_rate = 0.5;
  double label_noise = 0.0;
  std::uint64_t seed = 0;

  // Fills defaults that depend on other fields.
  SynthConfig Resolved() const;
  // Throws InvalidArgument on out-of-range fields.
  void Validate() const;
};

TaskSchema SynthSchema(const SynthConfig& cfg);

// Deterministic in `cfg`.
Dataset Generate(const SynthConfig& cfg);

// Provenance sidecar.
std::string SynthConfigToJson(const SynthConfig& cfg);
SynthConfig SynthConfigFromJson(std::string_view json_text);

}  // namespace hlvfair

#endif  // HLVFAIR_SYNTH_H_
