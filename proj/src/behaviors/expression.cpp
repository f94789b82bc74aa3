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

#include "sociobot/behaviors/expression.hpp"

#include <algorithm>

#include "sociobot/behaviors/recognition.hpp"

namespace sociobot::behaviors {
namespace {

using sim::Expression;

ExpressionPreset preset(Expression e, double lids, double brow_left, double brow_right,
                        double jaw) {
  return {e,
          {{"eyelid_left", lids},
           {"eyelid_right", lids},
           {"eyebrow_left", brow_left},
           {"eyebrow_right", brow_right},
           {"jaw", jaw}},
          &sim::expression_prototype(e)};
}

std::array<ExpressionPreset, 7> build() {
  // lids: + closes; brows: + raises; jaw: + opens.
  std::array<ExpressionPreset, 7> out = {
      preset(Expression::kNeutral, 0.0, 0.0, 0.0, 0.0),
      preset(Expression::kJoy, 0.25, 0.15, 0.15, 0.2),
      preset(Expression::kSadness, 0.45, -0.35, -0.35, 0.05),
      preset(Expression::kSurprise, -0.25, 0.45, 0.45, 0.4),
      preset(Expression::kDisgust, 0.5, -0.3, 0.1, 0.12),
      preset(Expression::kAnger, 0.35, -0.45, -0.45, 0.0),
      preset(Expression::kFear, -0.2, 0.3, 0.3, 0.3),
  };
  return out;
}

}  // namespace

const std::array<ExpressionPreset, 7>& expression_presets() {
  static const std::array<ExpressionPreset, 7> table = build();
  return table;
}

const ExpressionPreset& expression_preset(Expression label) {
  return expression_presets()[static_cast<std::size_t>(label)];
}

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

ExpressionTransition::ExpressionTransition(const JointTargets& from, Expression label,
                                           double duration)
    : from_(from), label_(label), duration_(duration) {
  if (!(duration > 0.0)) {
    throw BehaviorError(BehaviorErrc::kInvalidArgument, "expression duration must be positive");
  }
  const JointTargets& to = expression_preset(label).targets;
  if (from.size() != to.size()) {
    throw BehaviorError(BehaviorErrc::kInvalidArgument, "expression joint set mismatch");
  }
  for (std::size_t i = 0; i < to.size(); ++i) {
    if (from[i].first != to[i].first) {
      throw BehaviorError(BehaviorErrc::kInvalidArgument, "expression joint set mismatch");
    }
  }
}

JointTargets ExpressionTransition::at(double t) const {
  const JointTargets& to = expression_preset(label_).targets;
  if (t >= duration_) {
    return to;
  }
  const double w = smoothstep(t / duration_);
  JointTargets out = from_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].second = from_[i].second + w * (to[i].second - from_[i].second);
  }
  return out;
}

}  // namespace sociobot::behaviors
