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

#include "sociobot/behaviors/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sociobot::behaviors {
namespace {

GazeJoint read(const kin::KinematicTree& tree, const kin::JointVector& q, const std::string& name) {
  const kin::JointSpec& joint = tree.joint(name);
  GazeJoint out;
  out.position = q.at(name);
  if (joint.position_limited()) {
    out.lower = *joint.limits->lower;
    out.upper = *joint.limits->upper;
  } else {
    out.lower = -std::numeric_limits<double>::infinity();
    out.upper = std::numeric_limits<double>::infinity();
  }
  return out;
}

double clamped(const GazeJoint& j, double delta) {
  double d = std::clamp(j.position + delta, j.lower, j.upper) - j.position;
  // The subtraction can round so that position + d lands just outside.
  while (j.position + d > j.upper) {
    d = std::nextafter(d, -std::numeric_limits<double>::infinity());
  }
  while (j.position + d < j.lower) {
    d = std::nextafter(d, std::numeric_limits<double>::infinity());
  }
  return d;
}

}  // namespace

GazeState gaze_state(const kin::KinematicTree& tree, const kin::JointVector& q,
                     const GazeJointNames& names) {
  return {read(tree, q, names.neck_pan), read(tree, q, names.neck_tilt),
          read(tree, q, names.eyes_pan), read(tree, q, names.eyes_tilt)};
}

GazeDelta track_step(const Eigen::Vector2d& centroid, const sim::CameraModel& cam,
                     const GazeState& state, const TrackingGains& gains) {
  const double yaw = -gains.k * (centroid.x() - cam.cx) / cam.fx;
  const double pitch = -gains.k * (centroid.y() - cam.cy) / cam.fy;
  const double neck_share = 1.0 - gains.eye_share;
  GazeDelta d;
  d.eyes_pan = clamped(state.eyes_pan, gains.eye_share * yaw);
  d.eyes_tilt = clamped(state.eyes_tilt, gains.eye_share * pitch);
  d.neck_pan = clamped(state.neck_pan, neck_share * yaw);
  d.neck_tilt = clamped(state.neck_tilt, neck_share * pitch);
  return d;
}

GazeDelta track_face_step(std::span<const sim::FaceObservation> observations,
                          const sim::CameraModel& cam, const GazeState& state,
                          const TrackingGains& gains) {
  if (observations.empty()) {
    return {};
  }
  const auto nearest = std::min_element(
      observations.begin(), observations.end(),
      [](const sim::FaceObservation& a, const sim::FaceObservation& b) {
        return a.distance < b.distance;
      });
  return track_step(nearest->centroid, cam, state, gains);
}

}  // namespace sociobot::behaviors
