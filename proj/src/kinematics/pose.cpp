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

#include "sociobot/kinematics/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sociobot::kin {

UnitQuat make_unit_quat(double w, double x, double y, double z) {
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(norm) || norm == 0.0) {
    throw std::invalid_argument("quaternion must be finite and non-zero");
  }
  return UnitQuat(w / norm, x / norm, y / norm, z / norm);
}

UnitQuat quat_from_rpy(double roll, double pitch, double yaw) {
  const Eigen::AngleAxisd rx(roll, Vec3::UnitX());
  const Eigen::AngleAxisd ry(pitch, Vec3::UnitY());
  const Eigen::AngleAxisd rz(yaw, Vec3::UnitZ());
  UnitQuat q = rz * ry * rx;
  q.normalize();
  return q;
}

UnitQuat quat_from_rpy(const Vec3& rpy) { return quat_from_rpy(rpy.x(), rpy.y(), rpy.z()); }

YawPitchRoll yaw_pitch_roll(const UnitQuat& q) {
  const Eigen::Matrix3d r = q.toRotationMatrix();
  YawPitchRoll out;
  // R = Rz(yaw) Ry(pitch) Rx(roll); r(2,0) = -sin(pitch).
  out.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  out.yaw = std::atan2(r(1, 0), r(0, 0));
  out.roll = std::atan2(r(2, 1), r(2, 2));
  return out;
}

Vec3 orientation_error(const UnitQuat& target, const UnitQuat& current) {
  UnitQuat delta = target * current.conjugate();
  if (delta.w() < 0.0) {
    delta.coeffs() = -delta.coeffs();
  }
  const Vec3 v = delta.vec();
  const double s = v.norm();
  if (s < 1e-15) {
    return 2.0 * v;
  }
  const double angle = 2.0 * std::atan2(s, delta.w());
  return v * (angle / s);
}

Pose Pose::from_xyz_rpy(const Vec3& xyz, const Vec3& rpy) {
  return Pose{xyz, quat_from_rpy(rpy)};
}

Pose Pose::translation(const Vec3& xyz) { return Pose{xyz, UnitQuat::Identity()}; }

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.position = position + orientation * rhs.position;
  out.orientation = orientation * rhs.orientation;
  out.orientation.normalize();
  return out;
}

Vec3 Pose::operator*(const Vec3& point) const { return position + orientation * point; }

Pose Pose::inverse() const {
  Pose out;
  out.orientation = orientation.conjugate();
  out.position = -(out.orientation * position);
  return out;
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = orientation.toRotationMatrix();
  m.topRightCorner<3, 1>() = position;
  return m;
}

bool Pose::operator==(const Pose& rhs) const {
  return position == rhs.position && orientation.coeffs() == rhs.orientation.coeffs();
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, kTwoPi);
  if (wrapped <= -std::numbers::pi) {
    wrapped += kTwoPi;
  }
  return wrapped;
}

}  // namespace sociobot::kin
