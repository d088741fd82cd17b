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

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "hlvfair/aggregation.h"
#include "hlvfair/metrics.h"
#include "hlvfair/stats.h"
#include "hlvfair/synth.h"
#include "hlvfair/training.h"

namespace hlvfair {
namespace {

void BM_GeneralizedMean(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> s(n), w(n, 1.0 / static_cast<double>(n));
  for (auto& x : s) x = u(rng);
  double p = -14.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(GeneralizedMean(s, w, p));
    p = p > 14.0 ? -14.0 : p + 0.37;
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_GeneralizedMean)->Arg(4)->Arg(16)->Arg(256);

struct SynthFixture {
  Dataset dataset;
  LabelMatrix truth;
  LabelMatrix noisy;

  SynthFixture() : dataset(Generate(SynthConfig{})) {
    truth = SoftLabels(dataset, Split::kTest);
    noisy = truth;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 0.3);
    for (std::size_t i = 0; i < noisy.rows(); ++i) {
      for (std::size_t k = 0; k < noisy.cols(); ++k) {
        noisy(i, k) = std::min(1.0, noisy(i, k) + u(rng));
      }
    }
  }

  static const SynthFixture& Get() {
    static const SynthFixture fixture;
    return fixture;
  }
};

void BM_FairnessMatrix(benchmark::State& state) {
  const auto& f = SynthFixture::Get();
  const MembershipTable membership(f.dataset, Split::kTest);
  std::vector<std::size_t> rows(f.truth.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ComputeFairnessMatrix(f.truth, f.noisy, membership, rows));
  }
}
BENCHMARK(BM_FairnessMatrix);

void BM_Aggregate(benchmark::State& state) {
  const auto& f = SynthFixture::Get();
  const auto fm = ComputeFairnessMatrix(f.truth, f.noisy, f.dataset, Split::kTest);
  const auto configs = SampleConfigs(256, fm.num_groups, fm.num_classes, 3);
  std::size_t c = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Aggregate(fm, configs[c]));
    c = (c + 1) % configs.size();
  }
}
BENCHMARK(BM_Aggregate);

void BM_Featurize(benchmark::State& state) {
  const auto& f = SynthFixture::Get();
  const FeatureSpec spec;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Featurize(f.dataset.instances[i].text, spec));
    i = (i + 1) % f.dataset.instances.size();
  }
}
BENCHMARK(BM_Featurize);

void BM_ConfigSweep(benchmark::State& state) {
  const auto& f = SynthFixture::Get();
  const MethodScores base{"base", {}, {f.noisy}};
  const MethodScores hlv{"hlv", {}, {f.truth}};
  const auto configs = SampleConfigs(static_cast<std::size_t>(state.range(0)),
                                     f.dataset.schema.num_groups(),
                                     f.dataset.schema.num_classes(), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ConfigSweep(base, hlv, f.dataset, configs, {0.05, 1000, 5, 1}));
  }
}
BENCHMARK(BM_ConfigSweep)->Arg(10)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace hlvfair

BENCHMARK_MAIN();
