// Copyright 2026 The Sociobot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOCIOBOT_SIM_RANDOM_HPP_
#define SOCIOBOT_SIM_RANDOM_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace sociobot::sim {

// std::mt19937_64 is fully specified by the standard, the distributions are
// not. These helpers keep every seeded draw identical across toolchains.

// Uniform in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);

// Standard normal via Box-Muller; one value per call.
double standard_normal(std::mt19937_64& rng);

// splitmix64 finalizer folded over `parts`; used to derive independent
// streams (seed, tick, entity, channel) without sharing generator state.
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

}  // namespace sociobot::sim

#endif  // SOCIOBOT_SIM_RANDOM_HPP_
