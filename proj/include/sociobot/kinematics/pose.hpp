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

#ifndef SOCIOBOT_KINEMATICS_POSE_HPP_
#define SOCIOBOT_KINEMATICS_POSE_HPP_

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sociobot::kin {

using Vec3 = Eigen::Vector3d;

// Unit quaternion. Every helper in this header returns normalized values;
// callers constructing one by hand should go through make_unit_quat().
using UnitQuat = Eigen::Quaterniond;

// Normalizes (w, x, y, z). Throws std::invalid_argument on a zero or
// non-finite input.
UnitQuat make_unit_quat(double w, double x, double y, double z);

// Fixed-axis XYZ roll/pitch/yaw, the URDF convention: R = Rz(yaw) Ry(pitch) Rx(roll).
UnitQuat quat_from_rpy(double roll, double pitch, double yaw);
UnitQuat quat_from_rpy(const Vec3& rpy);

// Intrinsic Z-Y-X angles (yaw, pitch, roll) of a rotation. Inverse of
// quat_from_rpy up to the usual gimbal ambiguity.
struct YawPitchRoll {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};
YawPitchRoll yaw_pitch_roll(const UnitQuat& q);

// Rotation vector (axis * angle, angle in [0, pi]) of target * current^-1,
// i.e. the world-frame rotation that takes `current` onto `target`.
Vec3 orientation_error(const UnitQuat& target, const UnitQuat& current);

// Rigid transform: position in meters, orientation as a unit quaternion.
struct Pose {
  Vec3 position = Vec3::Zero();
  UnitQuat orientation = UnitQuat::Identity();

  static Pose identity() { return {}; }
  static Pose from_xyz_rpy(const Vec3& xyz, const Vec3& rpy);
  static Pose translation(const Vec3& xyz);

  // Composition: (*this) then rhs, both expressed right-to-left like
  // homogeneous matrices.
  Pose operator*(const Pose& rhs) const;
  Vec3 operator*(const Vec3& point) const;
  Pose inverse() const;

  Eigen::Matrix4d matrix() const;

  bool operator==(const Pose& rhs) const;
};

// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

}  // namespace sociobot::kin

#endif  // SOCIOBOT_KINEMATICS_POSE_HPP_
