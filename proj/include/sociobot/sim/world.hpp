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

#ifndef SOCIOBOT_SIM_WORLD_HPP_
#define SOCIOBOT_SIM_WORLD_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sociobot/kinematics/joint_vector.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/kinematics/pose.hpp"
#include "sociobot/sim/camera.hpp"
#include "sociobot/sim/faces.hpp"
#include "sociobot/sim/image.hpp"
#include "sociobot/sim/scene.hpp"

namespace sociobot::sim {

enum class Arm { kLeft, kRight };

std::string_view to_string(Arm arm);
std::optional<Arm> parse_arm(std::string_view name);

struct ServoGains {
  double kp = 60.0;
  double kd = 14.0;
};

// Joints whose name matches any pattern ('*' wildcard) get `gains`. Rules
// are tried in order; the first match wins.
struct GainRule {
  std::vector<std::string> patterns;
  ServoGains gains;
};

bool glob_match(std::string_view pattern, std::string_view text);

struct WorldConfig {
  double dt = 1.0 / 120.0;
  ServoGains default_gains{60.0, 14.0};
  std::vector<GainRule> gain_rules{{{"*_gripper_joint"}, {80.0, 16.0}},
                                   {{"l_*", "r_*"}, {40.0, 12.0}}};
  double grasp_radius = 0.05;       // m
  double face_noise_sigma = 0.02;
  CameraModel camera;
  std::string left_tool = "l_gripper";
  std::string right_tool = "r_gripper";
  std::uint64_t seed = 0;
};

struct FaceObservation {
  Descriptor descriptor;
  Descriptor expression_descriptor;
  Eigen::Vector2d centroid;  // px
  double distance = 0.0;     // m, camera to head center
};

// Fixed-step world. Joints follow PD servos toward their targets; objects
// only move when attached to a gripper or re-posed explicitly.
class World {
 public:
  World(kin::KinematicTree tree, WorldConfig config, Scene scene = {});

  const kin::KinematicTree& tree() const { return tree_; }
  const WorldConfig& config() const { return config_; }

  const kin::JointVector& q() const { return q_; }
  const kin::JointVector& qdot() const { return qdot_; }
  const kin::JointVector& target() const { return target_; }
  const ServoGains& gains(std::size_t slot) const { return gains_[slot]; }

  // Targets are taken as given; the servo clamps the resulting motion.
  void set_target(std::size_t slot, double value);
  void set_target(std::string_view joint, double value);  // throws KinematicsError
  // Teleports joints (velocity zeroed, clamped to limits) and re-poses
  // attached objects. Targets are left alone.
  void set_joint_state(const kin::JointVector& q);

  void step();

  std::uint64_t tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) * config_.dt; }

  const std::vector<SceneObject>& objects() const { return objects_; }
  const SceneObject& object(std::string_view id) const;  // throws kUnknownObject
  const std::vector<Avatar>& avatars() const { return avatars_; }
  const Avatar& avatar(std::string_view id) const;  // throws kUnknownAvatar

  kin::Pose link_pose(std::string_view link) const;  // throws kUnknownLink
  kin::Pose tool_pose(Arm arm) const;
  const std::string& tool_link(Arm arm) const;

  // Attaches the nearest free graspable object within grasp_radius of the
  // arm's tool link and returns its id; nullopt means NoTarget. An arm that
  // already holds something keeps it and returns that id.
  std::optional<std::string> grasp(Arm arm);
  // Detaches whatever the arm holds at its current pose; returns its id.
  std::optional<std::string> release(Arm arm);
  std::optional<std::string> held(Arm arm) const;

  void set_object_pose(std::string_view id, const kin::Pose& pose);
  void set_avatar_pose(std::string_view id, const kin::Pose& pose);
  void set_avatar_expression(std::string_view id, Expression expression);

  kin::Pose camera_pose(const CameraModel& cam) const;
  Image render_camera() const { return render_camera(config_.camera); }
  Image render_camera(const CameraModel& cam) const;

  // One observation per avatar whose head center projects inside the
  // image, nearest first. Noise is a pure function of (seed, tick, avatar).
  std::vector<FaceObservation> sense_faces() const { return sense_faces(config_.camera); }
  std::vector<FaceObservation> sense_faces(const CameraModel& cam) const;

 private:
  SceneObject& mutable_object(std::string_view id);
  void update_attachments();

  kin::KinematicTree tree_;
  WorldConfig config_;
  std::vector<ServoGains> gains_;
  kin::JointVector q_;
  kin::JointVector qdot_;
  kin::JointVector target_;
  std::vector<SceneObject> objects_;
  std::vector<Avatar> avatars_;
  std::uint64_t tick_ = 0;
};

}  // namespace sociobot::sim

#endif  // SOCIOBOT_SIM_WORLD_HPP_
