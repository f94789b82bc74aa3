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

#ifndef SOCIOBOT_BEHAVIORS_TELEOP_HPP_
#define SOCIOBOT_BEHAVIORS_TELEOP_HPP_

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "sociobot/behaviors/clips.hpp"
#include "sociobot/behaviors/expression.hpp"
#include "sociobot/kinematics/joint_vector.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/kinematics/pose.hpp"
#include "sociobot/sim/world.hpp"

namespace sociobot::behaviors {

struct ControllerState {
  kin::Pose pose;  // tool target in the robot base frame
  bool grip = false;
  bool enabled = false;
};

struct TeleopFrame {
  kin::UnitQuat headset = kin::UnitQuat::Identity();
  ControllerState left;
  ControllerState right;
};

// {"headset": [w, x, y, z],
//  "left":  {"pose": {"position": [x, y, z], "orientation": [w, x, y, z]},
//            "grip": false, "enabled": true},
//  "right": {...}}
// Missing controllers are disabled. Quaternions are normalized. Throws
// BehaviorError(kInvalidArgument).
TeleopFrame teleop_frame_from_json(const nlohmann::json& j);
nlohmann::json teleop_frame_to_json(const TeleopFrame& frame);

struct TeleopNames {
  std::string neck_pan = "neck_pan";
  std::string neck_tilt = "neck_tilt";
  std::string left_tool = "l_gripper";
  std::string right_tool = "r_gripper";
};

struct TeleopOutput {
  JointTargets targets;
  std::vector<GripEvent> events;
};

// Headset yaw/pitch (intrinsic ZYX) drive neck pan/tilt; each enabled
// controller drives its arm through IK warm-started from the current
// joints; grip transitions emit grasp/release.
class Teleoperator {
 public:
  explicit Teleoperator(const kin::KinematicTree& tree, TeleopNames names = {});

  TeleopOutput step(const TeleopFrame& frame, const kin::JointVector& q);
  void reset() { grip_ = {false, false}; }

 private:
  const kin::KinematicTree& tree_;
  TeleopNames names_;
  std::array<bool, 2> grip_{false, false};
};

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_TELEOP_HPP_
