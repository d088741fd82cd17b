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

#include "hlvfair/synth.h"

#include <algorithm>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "hlvfair/error.h"
#include "hlvfair/random.h"
#include "json.hpp"

namespace hlvfair {
namespace {

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

std::string ClassToken(std::size_t k, std::size_t j) {
  return fmt::format("c{}w{}", k, j);
}

// Secondary aspects of a class are worded differently from its main topic.
std::string SecondaryToken(std::size_t k, std::size_t j) {
  return fmt::format("c{}s{}", k, j);
}

}  // namespace

SynthConfig SynthConfig::Resolved() const {
  SynthConfig cfg = *this;
  if (cfg.specialisation_rarity.empty()) {
    cfg.specialisation_rarity.assign(cfg.num_classes, 0.3);
    if (cfg.rare_class < cfg.num_classes) {
      cfg.specialisation_rarity[cfg.rare_class] = 0.3;
    }
  }
  return cfg;
}

void SynthConfig::Validate() const {
  const SynthConfig cfg = Resolved();
  if (cfg.n_instances < 10) throw InvalidArgument("n_instances must be >= 10");
  if (cfg.num_classes < 3) {
    throw InvalidArgument("need a rare class and at least two common classes");
  }
  if (cfg.num_groups < 1) throw InvalidArgument("need at least one group");
  if (cfg.rare_class >= cfg.num_classes) {
    throw InvalidArgument("rare_class out of range");
  }
  if (cfg.correlated_group >= cfg.num_groups) {
    throw InvalidArgument("correlated_group out of range");
  }
  if (cfg.annotators_per_instance < 1 ||
      cfg.annotators_per_instance > cfg.pool_size) {
    throw InvalidArgument(
        "annotators_per_instance must lie in [1, pool_size]");
  }
  if (cfg.vocab_size < 1) throw InvalidArgument("vocab_size must be >= 1");
  if (cfg.specialisation_rarity.size() != cfg.num_classes) {
    throw InvalidArgument("specialisation_rarity needs one entry per class");
  }
  for (const double r : cfg.specialisation_rarity) {
    if (!IsProbability(r)) {
      throw InvalidArgument("specialisation_rarity entries must be in [0, 1]");
    }
  }
  if (!IsProbability(cfg.group_correlation) ||
      !IsProbability(cfg.rare_base_rate) ||
      !IsProbability(cfg.membership_rate) ||
      !IsProbability(cfg.unknown_rate) || !IsProbability(cfg.secondary_rate)) {
    throw InvalidArgument("rates must lie in [0, 1]");
  }
  if (!(cfg.label_noise >= 0.0 && cfg.label_noise < 1.0)) {
    throw InvalidArgument("label_noise must lie in [0, 1)");
  }
}

TaskSchema SynthSchema(const SynthConfig& cfg) {
  TaskSchema schema;
  schema.task = TaskKind::kMultiLabel;
  for (std::size_t k = 0; k < cfg.num_classes; ++k) {
    schema.classes.push_back(fmt::format("class_{}", k));
  }
  for (std::size_t g = 0; g < cfg.num_groups; ++g) {
    schema.groups.push_back(fmt::format("group_{}", g));
  }
  return schema;
}

Dataset Generate(const SynthConfig& raw) {
  raw.Validate();
  const SynthConfig cfg = raw.Resolved();
  const std::size_t num_classes = cfg.num_classes;
  Rng rng(DeriveSeed(cfg.seed, "synth.generate"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto bernoulli = [&](double p) { return unit(rng) < p; };

  std::vector<std::size_t> common;
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (k != cfg.rare_class) common.push_back(k);
  }
  std::uniform_int_distribution<std::size_t> pick_common(0, common.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_token(0,
                                                        cfg.vocab_size - 1);

  // specialist[a][k]: annotator a marks class k when it is true.
  std::vector<std::vector<bool>> specialist(
      cfg.pool_size, std::vector<bool>(num_classes, false));
  for (std::size_t k = 0; k < num_classes; ++k) {
    bool any = false;
    for (std::size_t a = 0; a < cfg.pool_size; ++a) {
      specialist[a][k] = bernoulli(cfg.specialisation_rarity[k]);
      any |= specialist[a][k];
    }
    if (!any && cfg.specialisation_rarity[k] > 0.0) specialist[0][k] = true;
  }

  Dataset dataset{SynthSchema(cfg), {}};
  dataset.instances.reserve(cfg.n_instances);
  std::vector<std::size_t> pool(cfg.pool_size);
  for (std::size_t i = 0; i < cfg.n_instances; ++i) {
    Instance inst;
    inst.id = fmt::format("syn{:05d}", i);
    inst.membership.resize(cfg.num_groups);
    for (auto& m : inst.membership) {
      if (bernoulli(cfg.unknown_rate)) {
        m = Membership::kUnknown;
      } else {
        m = bernoulli(cfg.membership_rate) ? Membership::kIn : Membership::kOut;
      }
    }

    const std::size_t primary = common[pick_common(rng)];
    std::vector<std::size_t> secondary;
    if (bernoulli(cfg.secondary_rate)) {
      const std::size_t extra = common[pick_common(rng)];
      if (extra != primary) secondary.push_back(extra);
    }
    const bool correlated =
        inst.membership[cfg.correlated_group] == Membership::kIn;
    const double rare_rate =
        correlated ? cfg.rare_base_rate +
                         cfg.group_correlation * (1.0 - cfg.rare_base_rate)
                   : cfg.rare_base_rate;
    const bool rare = bernoulli(rare_rate);

    std::vector<std::string> tokens;
    auto emit_class_tokens = [&](std::size_t k, auto&& token) {
      for (std::size_t t = 0; t < cfg.tokens_per_label; ++t) {
        tokens.push_back(token(k, pick_token(rng)));
      }
    };
    emit_class_tokens(primary, ClassToken);
    for (const auto k : secondary) emit_class_tokens(k, SecondaryToken);
    if (rare) emit_class_tokens(cfg.rare_class, ClassToken);
    for (std::size_t t = 0; t < cfg.background_tokens; ++t) {
      tokens.push_back(fmt::format("bgw{}", pick_token(rng)));
    }
    std::shuffle(tokens.begin(), tokens.end(), rng);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (t > 0) inst.text += ' ';
      inst.text += tokens[t];
    }

    // Partial Fisher-Yates: the first n entries are the sampled annotators.
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t a = 0; a < cfg.annotators_per_instance; ++a) {
      std::uniform_int_distribution<std::size_t> pick(a, pool.size() - 1);
      std::swap(pool[a], pool[pick(rng)]);
      const std::size_t who = pool[a];
      AnnotationRecord rec;
      rec.annotator = fmt::format("ann{:03d}", who);
      // A specialist who sees the rare class reports it in place of the
      // primary class.
      const bool sees_rare = rare && specialist[who][cfg.rare_class];
      rec.labels.push_back(sees_rare ? cfg.rare_class : primary);
      for (const auto k : secondary) {
        if (specialist[who][k]) rec.labels.push_back(k);
      }
      if (bernoulli(cfg.label_noise)) {
        rec.labels.push_back(common[pick_common(rng)]);
      }
      std::sort(rec.labels.begin(), rec.labels.end());
      rec.labels.erase(std::unique(rec.labels.begin(), rec.labels.end()),
                       rec.labels.end());
      inst.annotations.push_back(std::move(rec));
    }
    dataset.instances.push_back(std::move(inst));
  }

  std::vector<std::size_t> order(cfg.n_instances);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_train = cfg.n_instances * 8 / 10;
  const std::size_t n_dev = cfg.n_instances / 10;
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto& inst = dataset.instances[order[r]];
    inst.split = r < n_train           ? Split::kTrain
                 : r < n_train + n_dev ? Split::kDev
                                       : Split::kTest;
  }
  return dataset;
}

std::string SynthConfigToJson(const SynthConfig& raw) {
  const SynthConfig cfg = raw.Resolved();
  nlohmann::ordered_json j;
  j["n_instances"] = cfg.n_instances;
  j["num_classes"] = cfg.num_classes;
  j["num_groups"] = cfg.num_groups;
  j["annotators_per_instance"] = cfg.annotators_per_instance;
  j["pool_size"] = cfg.pool_size;
  j["vocab_size"] = cfg.vocab_size;
  j["tokens_per_label"] = cfg.tokens_per_label;
  j["background_tokens"] = cfg.background_tokens;
  j["specialisation_rarity"] = cfg.specialisation_rarity;
  j["rare_class"] = cfg.rare_class;
  j["correlated_group"] = cfg.correlated_group;
  j["group_correlation"] = cfg.group_correlation;
  j["rare_base_rate"] = cfg.rare_base_rate;
  j["membership_rate"] = cfg.membership_rate;
  j["unknown_rate"] = cfg.unknown_rate;
  j["secondary_rate"] = cfg.secondary_rate;
  j["label_noise"] = cfg.label_noise;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

SynthConfig SynthConfigFromJson(std::string_view json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    SynthConfig cfg;
    const auto read = [&j](const char* key, auto& field) {
      if (j.contains(key)) {
        field = j.at(key).get<std::decay_t<decltype(field)>>();
      }
    };
    read("n_instances", cfg.n_instances);
    read("num_classes", cfg.num_classes);
    read("num_groups", cfg.num_groups);
    read("annotators_per_instance", cfg.annotators_per_instance);
    read("pool_size", cfg.pool_size);
    read("vocab_size", cfg.vocab_size);
    read("tokens_per_label", cfg.tokens_per_label);
    read("background_tokens", cfg.background_tokens);
    read("specialisation_rarity", cfg.specialisation_rarity);
    cfg.rare_class = cfg.num_classes - 1;
    read("rare_class", cfg.rare_class);
    read("correlated_group", cfg.correlated_group);
    read("group_correlation", cfg.group_correlation);
    read("rare_base_rate", cfg.rare_base_rate);
    read("membership_rate", cfg.membership_rate);
    read("unknown_rate", cfg.unknown_rate);
    read("secondary_rate", cfg.secondary_rate);
    read("label_noise", cfg.label_noise);
    read("seed", cfg.seed);
    cfg.Validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("invalid synth config: ") + e.what());
  }
}

}  // namespace hlvfair
