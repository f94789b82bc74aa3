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

#include "sociobot/behaviors/teleop.hpp"

#include <cmath>

#include "sociobot/behaviors/recognition.hpp"
#include "sociobot/kinematics/kinematics.hpp"

namespace sociobot::behaviors {

using nlohmann::json;

namespace {

BehaviorError bad_frame(const std::string& what) {
  return BehaviorError(BehaviorErrc::kInvalidArgument, "teleop frame: " + what);
}

kin::UnitQuat quat_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 4) {
    throw bad_frame(field + " must be [w, x, y, z]");
  }
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_number()) {
      throw bad_frame(field + " must hold numbers");
    }
    v[i] = j[i].get<double>();
  }
  try {
    return kin::make_unit_quat(v[0], v[1], v[2], v[3]);
  } catch (const std::invalid_argument&) {
    throw bad_frame(field + " is not a valid rotation");
  }
}

ControllerState controller_from(const json& j, const std::string& side) {
  ControllerState c;
  if (!j.is_object()) {
    throw bad_frame(side + " must be an object");
  }
  c.enabled = j.value("enabled", true);
  c.grip = j.value("grip", false);
  if (j.contains("pose")) {
    const json& p = j["pose"];
    if (!p.is_object() || !p.contains("position") || !p["position"].is_array() ||
        p["position"].size() != 3) {
      throw bad_frame(side + ".pose.position must be [x, y, z]");
    }
    for (int i = 0; i < 3; ++i) {
      const json& x = p["position"][static_cast<std::size_t>(i)];
      if (!x.is_number() || !std::isfinite(x.get<double>())) {
        throw bad_frame(side + ".pose.position must be finite");
      }
      c.pose.position[i] = x.get<double>();
    }
    if (p.contains("orientation")) {
      c.pose.orientation = quat_from(p["orientation"], side + ".pose.orientation");
    }
  } else if (c.enabled) {
    throw bad_frame(side + " is enabled without a pose");
  }
  return c;
}

json quat_json(const kin::UnitQuat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

json controller_json(const ControllerState& c) {
  const kin::Vec3& p = c.pose.position;
  return {{"pose",
           {{"position", {p.x(), p.y(), p.z()}}, {"orientation", quat_json(c.pose.orientation)}}},
          {"grip", c.grip},
          {"enabled", c.enabled}};
}

}  // namespace

TeleopFrame teleop_frame_from_json(const json& j) {
  if (!j.is_object()) {
    throw bad_frame("payload must be an object");
  }
  TeleopFrame frame;
  if (j.contains("headset")) {
    frame.headset = quat_from(j["headset"], "headset");
  }
  if (j.contains("left")) {
    frame.left = controller_from(j["left"], "left");
  }
  if (j.contains("right")) {
    frame.right = controller_from(j["right"], "right");
  }
  return frame;
}

json teleop_frame_to_json(const TeleopFrame& frame) {
  return {{"headset", quat_json(frame.headset)},
          {"left", controller_json(frame.left)},
          {"right", controller_json(frame.right)}};
}

Teleoperator::Teleoperator(const kin::KinematicTree& tree, TeleopNames names)
    : tree_(tree), names_(std::move(names)) {}

TeleopOutput Teleoperator::step(const TeleopFrame& frame, const kin::JointVector& q) {
  TeleopOutput out;
  const kin::YawPitchRoll ypr = kin::yaw_pitch_roll(frame.headset);
  // Positive pitch looks down in ZYX; the tilt joint's positive sense is up.
  out.targets.emplace_back(names_.neck_pan, tree_.joint(names_.neck_pan).clamp(ypr.yaw));
  out.targets.emplace_back(names_.neck_tilt, tree_.joint(names_.neck_tilt).clamp(-ypr.pitch));

  const std::array<std::pair<sim::Arm, const ControllerState*>, 2> arms = {
      std::pair{sim::Arm::kLeft, &frame.left}, std::pair{sim::Arm::kRight, &frame.right}};
  for (const auto& [arm, state] : arms) {
    const auto side = static_cast<std::size_t>(arm);
    if (!state->enabled) {
      continue;
    }
    const std::string& tool = arm == sim::Arm::kLeft ? names_.left_tool : names_.right_tool;
    kin::IkOptions options;
    options.restarts = 0;
    const kin::IkResult result = kin::ik_solve(tree_, q, tool, state->pose, options);
    for (std::size_t slot : tree_.movable_chain_to(tool)) {
      out.targets.emplace_back(tree_.movable_joint(slot).name, result.q[slot]);
    }
    if (state->grip != grip_[side]) {
      out.events.push_back({arm, state->grip ? GripAction::kGrasp : GripAction::kRelease});
      grip_[side] = state->grip;
    }
  }
  return out;
}

}  // namespace sociobot::behaviors
