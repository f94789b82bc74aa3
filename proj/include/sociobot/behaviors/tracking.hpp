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

#ifndef SOCIOBOT_BEHAVIORS_TRACKING_HPP_
#define SOCIOBOT_BEHAVIORS_TRACKING_HPP_

#include <span>
#include <string>

#include <Eigen/Core>

#include "sociobot/kinematics/joint_vector.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/sim/camera.hpp"
#include "sociobot/sim/world.hpp"

namespace sociobot::behaviors {

struct TrackingGains {
  double k = 0.5;          // fraction of the angular error corrected per update
  double eye_share = 0.3;  // rest goes to the neck
};

struct GazeJoint {
  double position = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct GazeState {
  GazeJoint neck_pan;
  GazeJoint neck_tilt;
  GazeJoint eyes_pan;
  GazeJoint eyes_tilt;
};

struct GazeDelta {
  double neck_pan = 0.0;
  double neck_tilt = 0.0;
  double eyes_pan = 0.0;
  double eyes_tilt = 0.0;

  double yaw() const { return neck_pan + eyes_pan; }
  double pitch() const { return neck_tilt + eyes_tilt; }
};

struct GazeJointNames {
  std::string neck_pan = "neck_pan";
  std::string neck_tilt = "neck_tilt";
  std::string eyes_pan = "eyes_pan";
  std::string eyes_tilt = "eyes_tilt";
};

// Reads positions and limits of the four gaze joints from `q`.
GazeState gaze_state(const kin::KinematicTree& tree, const kin::JointVector& q,
                     const GazeJointNames& names = {});

// Image-space proportional law: yaw = -k (u - cx) / fx, pitch = -k (v - cy) / fy,
// split between eyes and neck, each delta clamped so position + delta stays
// inside the joint's limits.
GazeDelta track_step(const Eigen::Vector2d& centroid, const sim::CameraModel& cam,
                     const GazeState& state, const TrackingGains& gains = {});

// Same law on the nearest observation; no observation gives zero deltas.
GazeDelta track_face_step(std::span<const sim::FaceObservation> observations,
                          const sim::CameraModel& cam, const GazeState& state,
                          const TrackingGains& gains = {});

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_TRACKING_HPP_
