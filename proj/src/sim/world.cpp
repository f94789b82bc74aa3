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

#include "sociobot/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sociobot/kinematics/kinematics.hpp"
#include "sociobot/sim/random.hpp"

namespace sociobot::sim {

std::string_view to_string(Arm arm) { return arm == Arm::kLeft ? "left" : "right"; }

std::optional<Arm> parse_arm(std::string_view name) {
  if (name == "left") {
    return Arm::kLeft;
  }
  if (name == "right") {
    return Arm::kRight;
  }
  return std::nullopt;
}

bool glob_match(std::string_view pattern, std::string_view text) {
  // Iterative '*' matcher with single-star backtracking.
  std::size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (p < pattern.size() && pattern[p] == text[t]) {
      ++p;
      ++t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') {
    ++p;
  }
  return p == pattern.size();
}

World::World(kin::KinematicTree tree, WorldConfig config, Scene scene)
    : tree_(std::move(tree)),
      config_(std::move(config)),
      q_(tree_),
      qdot_(tree_),
      target_(tree_),
      objects_(std::move(scene.objects)),
      avatars_(std::move(scene.avatars)) {
  if (!(config_.dt > 0.0)) {
    throw SimError(SimErrc::kInvalidArgument, "dt must be positive");
  }
  config_.camera.validate();
  if (!tree_.has_link(config_.camera.mount_link)) {
    throw SimError(SimErrc::kUnknownLink, "camera mount link " + config_.camera.mount_link);
  }
  for (const std::string* link : {&config_.left_tool, &config_.right_tool}) {
    if (!tree_.has_link(*link)) {
      throw SimError(SimErrc::kUnknownLink, "tool link " + *link);
    }
  }
  gains_.reserve(tree_.num_movable());
  for (std::size_t i = 0; i < tree_.num_movable(); ++i) {
    const std::string& name = tree_.movable_joint(i).name;
    ServoGains g = config_.default_gains;
    for (const GainRule& rule : config_.gain_rules) {
      const bool hit = std::any_of(rule.patterns.begin(), rule.patterns.end(),
                                   [&](const std::string& p) { return glob_match(p, name); });
      if (hit) {
        g = rule.gains;
        break;
      }
    }
    gains_.push_back(g);
  }
  kin::clamp_to_limits(tree_, q_);
  target_ = q_;
  for (const SceneObject& o : objects_) {
    if (o.attached_to) {
      throw SimError(SimErrc::kBadScene, "object " + o.id + " cannot start attached");
    }
  }
}

void World::set_target(std::size_t slot, double value) {
  if (slot >= target_.size() || !std::isfinite(value)) {
    throw SimError(SimErrc::kInvalidArgument, "bad joint target");
  }
  target_[slot] = value;
}

void World::set_target(std::string_view joint, double value) {
  const auto slot = tree_.movable_index(joint);
  if (!slot) {
    throw kin::KinematicsError(kin::KinematicsErrc::kUnknownJoint,
                               "unknown joint " + std::string(joint));
  }
  set_target(*slot, value);
}

void World::set_joint_state(const kin::JointVector& q) {
  if (!q.same_layout(q_)) {
    throw SimError(SimErrc::kInvalidArgument, "joint vector layout mismatch");
  }
  q_ = q;
  kin::clamp_to_limits(tree_, q_);
  qdot_.values().setZero();
  update_attachments();
}

void World::step() {
  const double dt = config_.dt;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const kin::JointSpec& joint = tree_.movable_joint(i);
    const ServoGains& g = gains_[i];
    const double accel = g.kp * (target_[i] - q_[i]) - g.kd * qdot_[i];
    double v = qdot_[i] + accel * dt;
    const double vmax = joint.limits ? joint.limits->max_velocity
                                     : std::numeric_limits<double>::infinity();
    v = std::clamp(v, -vmax, vmax);
    double x = q_[i] + v * dt;
    if (joint.position_limited()) {
      if (x <= *joint.limits->lower) {
        x = *joint.limits->lower;
        v = 0.0;
      } else if (x >= *joint.limits->upper) {
        x = *joint.limits->upper;
        v = 0.0;
      }
    }
    q_[i] = x;
    qdot_[i] = v;
  }
  ++tick_;
  update_attachments();
}

void World::update_attachments() {
  for (SceneObject& o : objects_) {
    if (o.attached_to) {
      o.pose = kin::forward_kinematics(tree_, q_, *o.attached_to) * o.attach_offset;
    }
  }
}

const SceneObject& World::object(std::string_view id) const {
  for (const SceneObject& o : objects_) {
    if (o.id == id) {
      return o;
    }
  }
  throw SimError(SimErrc::kUnknownObject, "unknown object " + std::string(id));
}

SceneObject& World::mutable_object(std::string_view id) {
  return const_cast<SceneObject&>(std::as_const(*this).object(id));
}

const Avatar& World::avatar(std::string_view id) const {
  for (const Avatar& a : avatars_) {
    if (a.id == id) {
      return a;
    }
  }
  throw SimError(SimErrc::kUnknownAvatar, "unknown avatar " + std::string(id));
}

kin::Pose World::link_pose(std::string_view link) const {
  if (!tree_.has_link(link)) {
    throw SimError(SimErrc::kUnknownLink, "unknown link " + std::string(link));
  }
  return kin::forward_kinematics(tree_, q_, link);
}

const std::string& World::tool_link(Arm arm) const {
  return arm == Arm::kLeft ? config_.left_tool : config_.right_tool;
}

kin::Pose World::tool_pose(Arm arm) const { return link_pose(tool_link(arm)); }

std::optional<std::string> World::held(Arm arm) const {
  for (const SceneObject& o : objects_) {
    if (o.attached_to && *o.attached_to == tool_link(arm)) {
      return o.id;
    }
  }
  return std::nullopt;
}

std::optional<std::string> World::grasp(Arm arm) {
  if (auto current = held(arm)) {
    return current;
  }
  const kin::Pose tool = tool_pose(arm);
  SceneObject* best = nullptr;
  double best_distance = config_.grasp_radius;
  for (SceneObject& o : objects_) {
    if (!o.graspable || o.attached_to) {
      continue;
    }
    const double d = (o.pose.position - tool.position).norm();
    if (d <= best_distance) {
      best_distance = d;
      best = &o;
    }
  }
  if (best == nullptr) {
    return std::nullopt;
  }
  best->attached_to = tool_link(arm);
  best->attach_offset = tool.inverse() * best->pose;
  return best->id;
}

std::optional<std::string> World::release(Arm arm) {
  for (SceneObject& o : objects_) {
    if (o.attached_to && *o.attached_to == tool_link(arm)) {
      o.attached_to.reset();
      o.attach_offset = kin::Pose::identity();
      return o.id;
    }
  }
  return std::nullopt;
}

void World::set_object_pose(std::string_view id, const kin::Pose& pose) {
  SceneObject& o = mutable_object(id);
  if (o.attached_to) {
    throw SimError(SimErrc::kObjectAttached, "object " + o.id + " is held by " + *o.attached_to);
  }
  if (!pose.position.allFinite() || !pose.orientation.coeffs().allFinite()) {
    throw SimError(SimErrc::kInvalidArgument, "pose must be finite");
  }
  o.pose = pose;
}

void World::set_avatar_pose(std::string_view id, const kin::Pose& pose) {
  if (!pose.position.allFinite() || !pose.orientation.coeffs().allFinite()) {
    throw SimError(SimErrc::kInvalidArgument, "pose must be finite");
  }
  const_cast<Avatar&>(avatar(id)).pose = pose;
}

void World::set_avatar_expression(std::string_view id, Expression expression) {
  const_cast<Avatar&>(avatar(id)).expression = expression;
}

kin::Pose World::camera_pose(const CameraModel& cam) const { return link_pose(cam.mount_link); }

Image World::render_camera(const CameraModel& cam) const {
  return render(cam, camera_pose(cam), objects_, avatars_);
}

std::vector<FaceObservation> World::sense_faces(const CameraModel& cam) const {
  const kin::Pose world_to_cam = camera_pose(cam).inverse();
  std::vector<FaceObservation> out;
  for (std::size_t i = 0; i < avatars_.size(); ++i) {
    const Avatar& a = avatars_[i];
    const kin::Vec3 p = world_to_cam * a.pose.position;
    const auto uv = project(cam, p);
    if (!uv || !inside_image(cam, *uv)) {
      continue;
    }
    std::mt19937_64 identity_rng(mix_seed({config_.seed, tick_, i, 0}));
    std::mt19937_64 expression_rng(mix_seed({config_.seed, tick_, i, 1}));
    out.push_back({add_noise(a.descriptor, config_.face_noise_sigma, identity_rng),
                   add_noise(expression_prototype(a.expression), config_.face_noise_sigma,
                             expression_rng),
                   *uv, p.norm()});
  }
  std::stable_sort(out.begin(), out.end(), [](const FaceObservation& a, const FaceObservation& b) {
    return a.distance < b.distance;
  });
  return out;
}

}  // namespace sociobot::sim
