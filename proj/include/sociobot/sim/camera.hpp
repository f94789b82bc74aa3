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

#ifndef SOCIOBOT_SIM_CAMERA_HPP_
#define SOCIOBOT_SIM_CAMERA_HPP_

#include <optional>
#include <span>
#include <string>

#include <Eigen/Core>

#include "sociobot/kinematics/pose.hpp"
#include "sociobot/sim/image.hpp"
#include "sociobot/sim/scene.hpp"

namespace sociobot::sim {

// Pinhole camera looking along +x of its mount link, image u to the right
// (-y) and v down (-z). Pixel i is centered at coordinate i.
struct CameraModel {
  int width = 128;
  int height = 96;
  double fx = 110.0;
  double fy = 110.0;
  double cx = 64.0;
  double cy = 48.0;
  std::string mount_link = "camera_link";
  double near = 0.05;  // m

  // Throws SimError(kInvalidArgument) when the invariants do not hold.
  void validate() const;
};

// Pixel coordinates of a camera-frame point; nullopt in front of the near
// plane.
std::optional<Eigen::Vector2d> project(const CameraModel& cam, const kin::Vec3& p_cam);

bool inside_image(const CameraModel& cam, const Eigen::Vector2d& uv);

// Flat-shaded raster of spheres (projected disks of radius f r / depth)
// and boxes (filled hull of the projected corners), farthest center first.
// Avatars render as head spheres in skin color.
Image render(const CameraModel& cam, const kin::Pose& camera_pose,
             std::span<const SceneObject> objects, std::span<const Avatar> avatars);

}  // namespace sociobot::sim

#endif  // SOCIOBOT_SIM_CAMERA_HPP_
