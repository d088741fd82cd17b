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

#ifndef HLVFAIR_RANDOM_H_
#define HLVFAIR_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace hlvfair {

using Rng = std::mt19937_64;

// Stable across platforms and runs: FNV-1a of `component` mixed with the
// master seed and index through SplitMix64. Independent streams for every
// (component, index) pair.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view component,
                         std::uint64_t index = 0);

// 64-bit FNV-1a.
std::uint64_t StableHash(std::string_view bytes);

}  // namespace hlvfair

#endif  // HLVFAIR_RANDOM_H_
