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

#include "sociobot/sim/faces.hpp"

#include "sociobot/sim/random.hpp"

namespace sociobot::sim {
namespace {

constexpr std::uint64_t kPrototypeSeed = 0x7e57f4ce5ULL;
constexpr double kPrototypeSpread = 0.108;

std::array<Descriptor, 7> build_prototypes() {
  std::mt19937_64 rng(kPrototypeSeed);
  const Descriptor center = random_unit_descriptor(rng);
  std::array<Descriptor, 5> basis;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    Descriptor e = random_unit_descriptor(rng);
    e -= e.dot(center) * center;
    for (std::size_t k = 0; k < i; ++k) {
      e -= e.dot(basis[k]) * basis[k];
    }
    basis[i] = e.normalized();
  }
  auto primary = [&](std::size_t i) -> Descriptor {
    return (center + kPrototypeSpread * basis[i]).normalized();
  };
  std::array<Descriptor, 7> out;
  out[static_cast<std::size_t>(Expression::kNeutral)] = primary(0);
  out[static_cast<std::size_t>(Expression::kJoy)] = primary(1);
  out[static_cast<std::size_t>(Expression::kSadness)] = primary(2);
  out[static_cast<std::size_t>(Expression::kSurprise)] = primary(3);
  out[static_cast<std::size_t>(Expression::kAnger)] = primary(4);
  const auto at = [&](Expression e) { return out[static_cast<std::size_t>(e)]; };
  out[static_cast<std::size_t>(Expression::kFear)] =
      (at(Expression::kSurprise) + at(Expression::kSadness)).normalized();
  out[static_cast<std::size_t>(Expression::kDisgust)] =
      (at(Expression::kAnger) + at(Expression::kJoy)).normalized();
  return out;
}

}  // namespace

std::string_view to_string(Expression e) {
  switch (e) {
    case Expression::kNeutral:
      return "neutral";
    case Expression::kJoy:
      return "joy";
    case Expression::kSadness:
      return "sadness";
    case Expression::kSurprise:
      return "surprise";
    case Expression::kDisgust:
      return "disgust";
    case Expression::kAnger:
      return "anger";
    case Expression::kFear:
      return "fear";
  }
  return "?";
}

std::optional<Expression> parse_expression(std::string_view label) {
  for (Expression e : kExpressions) {
    if (to_string(e) == label) {
      return e;
    }
  }
  return std::nullopt;
}

Descriptor random_unit_descriptor(std::mt19937_64& rng) {
  Descriptor d;
  do {
    for (int i = 0; i < kDescriptorDim; ++i) {
      d[i] = standard_normal(rng);
    }
  } while (d.norm() < 1e-6);
  return d.normalized();
}

Descriptor derived_descriptor(std::string_view id) {
  std::mt19937_64 rng(fnv1a(id));
  return random_unit_descriptor(rng);
}

Descriptor add_noise(const Descriptor& d, double sigma, std::mt19937_64& rng) {
  if (sigma == 0.0) {
    return d;
  }
  Descriptor noisy = d;
  for (int i = 0; i < kDescriptorDim; ++i) {
    noisy[i] += sigma * standard_normal(rng);
  }
  return noisy.normalized();
}

const std::array<Descriptor, 7>& expression_prototypes() {
  static const std::array<Descriptor, 7> table = build_prototypes();
  return table;
}

const Descriptor& expression_prototype(Expression e) {
  return expression_prototypes()[static_cast<std::size_t>(e)];
}

}  // namespace sociobot::sim
