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

#ifndef SOCIOBOT_BEHAVIORS_EXPRESSION_HPP_
#define SOCIOBOT_BEHAVIORS_EXPRESSION_HPP_

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "sociobot/sim/faces.hpp"

namespace sociobot::behaviors {

using JointTargets = std::vector<std::pair<std::string, double>>;

struct ExpressionPreset {
  sim::Expression label;
  JointTargets targets;  // face joints -> rad
  const sim::Descriptor* prototype;
};

// One preset per label, in sim::kExpressions order. Neutral is all zeros.
const std::array<ExpressionPreset, 7>& expression_presets();
const ExpressionPreset& expression_preset(sim::Expression label);

inline constexpr double kDefaultExpressionDuration = 0.6;  // s

// 3t^2 - 2t^3 on t clamped to [0, 1].
double smoothstep(double t);

// Interpolates face targets from `from` to a preset over `duration`.
class ExpressionTransition {
 public:
  // `from` must name the same joints, in the same order, as the preset.
  // Throws BehaviorError(kInvalidArgument) for duration <= 0 or a mismatch.
  ExpressionTransition(const JointTargets& from, sim::Expression label, double duration);

  // t in seconds since the start. t >= duration returns the preset exactly.
  JointTargets at(double t) const;
  bool done(double t) const { return t >= duration_; }
  sim::Expression label() const { return label_; }
  double duration() const { return duration_; }

 private:
  JointTargets from_;
  sim::Expression label_;
  double duration_;
};

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_EXPRESSION_HPP_
