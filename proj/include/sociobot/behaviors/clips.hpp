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

#ifndef SOCIOBOT_BEHAVIORS_CLIPS_HPP_
#define SOCIOBOT_BEHAVIORS_CLIPS_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "sociobot/behaviors/expression.hpp"
#include "sociobot/kinematics/joint_vector.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/sim/world.hpp"

namespace sociobot::behaviors {

enum class GripAction { kGrasp, kRelease };

std::string_view to_string(GripAction action);

struct GripEvent {
  sim::Arm arm = sim::Arm::kLeft;
  GripAction action = GripAction::kGrasp;
  bool operator==(const GripEvent&) const = default;
};

struct Keyframe {
  double t = 0.0;                        // s from clip start
  std::map<std::string, double> targets;  // partial joint vector
  std::vector<GripEvent> events;
  bool operator==(const Keyframe&) const = default;
};

struct MotionClip {
  std::string name;
  std::vector<Keyframe> keyframes;

  double duration() const { return keyframes.empty() ? 0.0 : keyframes.back().t; }
  bool operator==(const MotionClip&) const = default;
};

// Clip file:
//   {"name": "wave",
//    "keyframes": [{"t": 0.0, "targets": {"neck_pan": 0.2},
//                   "events": [{"arm": "left", "action": "grasp"}]}, ...]}
// "targets" and "events" are optional per keyframe. Throws
// BehaviorError(kBadClip).
MotionClip clip_from_json(const nlohmann::json& j);
nlohmann::json clip_to_json(const MotionClip& clip);
MotionClip load_clip(const std::filesystem::path& path);
void save_clip(const MotionClip& clip, const std::filesystem::path& path);

// Checks t0 = 0, strictly increasing t, known movable joints and targets
// within limits. Throws BehaviorError(kBadClip) naming the keyframe.
void validate_clip(const MotionClip& clip, const kin::KinematicTree& tree);

// Arms a clip occupies: any arm joint ("l_*"/"r_*") or grip event.
std::set<sim::Arm> arms_of(const MotionClip& clip);

// Per-joint piecewise-linear playback. A joint absent from the t = 0
// keyframe starts from its value in `start`; after its last keyframe a
// joint holds. Events fire on the first sample with t >= their keyframe.
class ClipPlayer {
 public:
  ClipPlayer(MotionClip clip, const kin::JointVector& start);

  struct Sample {
    JointTargets targets;
    std::vector<GripEvent> events;
  };

  // Samples must be requested with non-decreasing t.
  Sample sample(double t);
  bool finished() const { return finished_; }
  const MotionClip& clip() const { return clip_; }

  // Interpolated targets at t without consuming events.
  JointTargets targets_at(double t) const;

 private:
  struct Track {
    std::string joint;
    std::vector<double> times;
    std::vector<double> values;
  };

  MotionClip clip_;
  std::vector<Track> tracks_;
  std::size_t next_event_keyframe_ = 0;
  bool finished_ = false;
};

// Builds a clip from a stream of joint-target samples and grip events.
// Sample times become keyframe times, so a player queried at the same
// instants returns the recorded targets bit for bit.
class ClipRecorder {
 public:
  explicit ClipRecorder(std::string name) { clip_.name = std::move(name); }

  // t must be strictly increasing and start at 0.
  void add_sample(double t, const JointTargets& targets);
  // Attaches to the sample at t, creating an empty one if needed.
  void add_event(double t, GripEvent event);

  const MotionClip& clip() const { return clip_; }
  MotionClip finish() { return std::move(clip_); }

 private:
  Keyframe& keyframe_at(double t);

  MotionClip clip_;
};

struct PickPlaceOptions {
  double approach_height = 0.10;  // pre-grasp offset above the object, m
  double lift_height = 0.20;      // m
  double gripper_open = 0.04;     // m
  double move_time = 1.2;         // s per motion segment
  double hold_time = 0.8;         // s to settle before grasp/release
};

// Pick, lift, hold and place back in one clip, planned with position-only
// IK from `start` for the tool link of `arm`. Throws BehaviorError(kBadClip)
// if a waypoint is out of reach.
MotionClip make_pick_place_clip(const kin::KinematicTree& tree, const kin::JointVector& start,
                                sim::Arm arm, const Eigen::Vector3d& object_position,
                                const std::string& tool_link,
                                const PickPlaceOptions& options = {});

// The two halves, for the "pick up" / "put it down" commands. The place
// clip returns the object to `place_position`.
MotionClip make_pick_clip(const kin::KinematicTree& tree, const kin::JointVector& start,
                          sim::Arm arm, const Eigen::Vector3d& object_position,
                          const std::string& tool_link, const PickPlaceOptions& options = {});
MotionClip make_place_clip(const kin::KinematicTree& tree, const kin::JointVector& start,
                           sim::Arm arm, const Eigen::Vector3d& place_position,
                           const std::string& tool_link, const PickPlaceOptions& options = {});

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_CLIPS_HPP_
