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

#ifndef SOCIOBOT_SIM_FACES_HPP_
#define SOCIOBOT_SIM_FACES_HPP_

#include <array>
#include <optional>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace sociobot::sim {

inline constexpr int kDescriptorDim = 16;
using Descriptor = Eigen::Matrix<double, kDescriptorDim, 1>;

// Order matches the robot's expression set: neutral first.
enum class Expression { kNeutral, kJoy, kSadness, kSurprise, kDisgust, kAnger, kFear };

inline constexpr std::array<Expression, 7> kExpressions = {
    Expression::kNeutral, Expression::kJoy,   Expression::kSadness, Expression::kSurprise,
    Expression::kDisgust, Expression::kAnger, Expression::kFear};

std::string_view to_string(Expression e);
std::optional<Expression> parse_expression(std::string_view label);

// Unit-norm Gaussian draw.
Descriptor random_unit_descriptor(std::mt19937_64& rng);

// Stable descriptor for an identity string, used when a scene or gallery
// entry does not list one explicitly.
Descriptor derived_descriptor(std::string_view id);

// d + N(0, sigma^2 I), renormalized. sigma == 0 returns d unchanged.
Descriptor add_noise(const Descriptor& d, double sigma, std::mt19937_64& rng);

// The shipped expression prototypes. Five labels (neutral, joy, sadness,
// surprise, anger) sit at c + r e_i around a common center c with
// orthonormal e_i, pairwise distance ~0.15. Fear is the normalized midpoint
// of surprise and sadness and disgust that of anger and joy, so each sits at
// half that distance from its nearest neighbors and is confused more often
// under sensor noise.
const std::array<Descriptor, 7>& expression_prototypes();
const Descriptor& expression_prototype(Expression e);

}  // namespace sociobot::sim

#endif  // SOCIOBOT_SIM_FACES_HPP_
