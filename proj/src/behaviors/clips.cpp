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

#include "sociobot/behaviors/clips.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sociobot/behaviors/recognition.hpp"
#include "sociobot/kinematics/kinematics.hpp"

namespace sociobot::behaviors {

using nlohmann::json;

namespace {

BehaviorError bad_clip(const std::string& what) {
  return BehaviorError(BehaviorErrc::kBadClip, what);
}

std::string keyframe_label(const MotionClip& clip, std::size_t i) {
  return "clip '" + clip.name + "' keyframe " + std::to_string(i);
}

}  // namespace

std::string_view to_string(GripAction action) {
  return action == GripAction::kGrasp ? "grasp" : "release";
}

MotionClip clip_from_json(const json& j) {
  if (!j.is_object()) {
    throw bad_clip("clip must be a JSON object");
  }
  MotionClip clip;
  if (!j.contains("name") || !j["name"].is_string()) {
    throw bad_clip("clip needs a string 'name'");
  }
  clip.name = j["name"].get<std::string>();
  if (!j.contains("keyframes") || !j["keyframes"].is_array()) {
    throw bad_clip("clip '" + clip.name + "' needs a 'keyframes' list");
  }
  const json& frames = j["keyframes"];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const json& f = frames[i];
    const std::string where = keyframe_label(clip, i);
    if (!f.is_object() || !f.contains("t") || !f["t"].is_number()) {
      throw bad_clip(where + ": needs a numeric 't'");
    }
    Keyframe key;
    key.t = f["t"].get<double>();
    if (f.contains("targets")) {
      if (!f["targets"].is_object()) {
        throw bad_clip(where + ": 'targets' must be an object");
      }
      for (const auto& [joint, value] : f["targets"].items()) {
        if (!value.is_number()) {
          throw bad_clip(where + ": target for " + joint + " is not a number");
        }
        key.targets[joint] = value.get<double>();
      }
    }
    if (f.contains("events")) {
      if (!f["events"].is_array()) {
        throw bad_clip(where + ": 'events' must be a list");
      }
      for (const json& e : f["events"]) {
        if (!e.is_object() || !e.contains("arm") || !e["arm"].is_string() ||
            !e.contains("action") || !e["action"].is_string()) {
          throw bad_clip(where + ": events need string 'arm' and 'action'");
        }
        const auto arm = sim::parse_arm(e["arm"].get<std::string>());
        const std::string action = e["action"].get<std::string>();
        if (!arm || (action != "grasp" && action != "release")) {
          throw bad_clip(where + ": bad event " + e.dump());
        }
        key.events.push_back(
            {*arm, action == "grasp" ? GripAction::kGrasp : GripAction::kRelease});
      }
    }
    clip.keyframes.push_back(std::move(key));
  }
  return clip;
}

json clip_to_json(const MotionClip& clip) {
  json frames = json::array();
  for (const Keyframe& key : clip.keyframes) {
    json f = {{"t", key.t}, {"targets", json::object()}};
    for (const auto& [joint, value] : key.targets) {
      f["targets"][joint] = value;
    }
    if (!key.events.empty()) {
      f["events"] = json::array();
      for (const GripEvent& e : key.events) {
        f["events"].push_back({{"arm", sim::to_string(e.arm)}, {"action", to_string(e.action)}});
      }
    }
    frames.push_back(std::move(f));
  }
  return {{"name", clip.name}, {"keyframes", std::move(frames)}};
}

MotionClip load_clip(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw bad_clip("cannot open clip " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return clip_from_json(json::parse(text.str()));
  } catch (const json::parse_error& e) {
    throw bad_clip(path.string() + ": " + e.what());
  }
}

void save_clip(const MotionClip& clip, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw bad_clip("cannot write clip " + path.string());
  }
  out << clip_to_json(clip).dump(2) << '\n';
}

void validate_clip(const MotionClip& clip, const kin::KinematicTree& tree) {
  if (clip.keyframes.empty()) {
    throw bad_clip("clip '" + clip.name + "' has no keyframes");
  }
  for (std::size_t i = 0; i < clip.keyframes.size(); ++i) {
    const Keyframe& key = clip.keyframes[i];
    const std::string where = keyframe_label(clip, i);
    if (!std::isfinite(key.t)) {
      throw bad_clip(where + ": t is not finite");
    }
    if (i == 0 && key.t != 0.0) {
      throw bad_clip(where + ": first keyframe must be at t = 0");
    }
    if (i > 0 && !(key.t > clip.keyframes[i - 1].t)) {
      throw bad_clip(where + ": t must be strictly increasing");
    }
    for (const auto& [joint, value] : key.targets) {
      if (!tree.movable_index(joint)) {
        throw bad_clip(where + ": unknown joint " + joint);
      }
      const kin::JointSpec& spec = tree.joint(joint);
      if (!std::isfinite(value) || spec.clamp(value) != value) {
        throw bad_clip(where + ": target " + std::to_string(value) + " for " + joint +
                       " is outside its limits");
      }
    }
  }
}

std::set<sim::Arm> arms_of(const MotionClip& clip) {
  std::set<sim::Arm> arms;
  for (const Keyframe& key : clip.keyframes) {
    for (const auto& [joint, value] : key.targets) {
      if (joint.starts_with("l_")) {
        arms.insert(sim::Arm::kLeft);
      } else if (joint.starts_with("r_")) {
        arms.insert(sim::Arm::kRight);
      }
    }
    for (const GripEvent& e : key.events) {
      arms.insert(e.arm);
    }
  }
  return arms;
}

ClipPlayer::ClipPlayer(MotionClip clip, const kin::JointVector& start) : clip_(std::move(clip)) {
  std::set<std::string> joints;
  for (const Keyframe& key : clip_.keyframes) {
    for (const auto& [joint, value] : key.targets) {
      joints.insert(joint);
    }
  }
  for (const std::string& joint : joints) {
    Track track{joint, {}, {}};
    if (clip_.keyframes.front().targets.count(joint) == 0) {
      track.times.push_back(0.0);
      track.values.push_back(start.at(joint));
    }
    for (const Keyframe& key : clip_.keyframes) {
      const auto it = key.targets.find(joint);
      if (it != key.targets.end()) {
        track.times.push_back(key.t);
        track.values.push_back(it->second);
      }
    }
    tracks_.push_back(std::move(track));
  }
  finished_ = clip_.keyframes.empty();
}

JointTargets ClipPlayer::targets_at(double t) const {
  JointTargets out;
  out.reserve(tracks_.size());
  for (const Track& track : tracks_) {
    double value;
    if (t <= track.times.front()) {
      value = track.values.front();
    } else if (t >= track.times.back()) {
      value = track.values.back();
    } else {
      // times[k] <= t < times[k + 1]; at a knot this yields the knot value exactly.
      const auto upper = std::upper_bound(track.times.begin(), track.times.end(), t);
      const auto k = static_cast<std::size_t>(upper - track.times.begin()) - 1;
      const double w = (t - track.times[k]) / (track.times[k + 1] - track.times[k]);
      value = track.values[k] + w * (track.values[k + 1] - track.values[k]);
    }
    out.emplace_back(track.joint, value);
  }
  return out;
}

ClipPlayer::Sample ClipPlayer::sample(double t) {
  Sample s{targets_at(t), {}};
  while (next_event_keyframe_ < clip_.keyframes.size() &&
         clip_.keyframes[next_event_keyframe_].t <= t) {
    const auto& events = clip_.keyframes[next_event_keyframe_].events;
    s.events.insert(s.events.end(), events.begin(), events.end());
    ++next_event_keyframe_;
  }
  finished_ = next_event_keyframe_ == clip_.keyframes.size();
  return s;
}

Keyframe& ClipRecorder::keyframe_at(double t) {
  auto& frames = clip_.keyframes;
  auto it = std::lower_bound(frames.begin(), frames.end(), t,
                             [](const Keyframe& k, double value) { return k.t < value; });
  if (it != frames.end() && it->t == t) {
    return *it;
  }
  return *frames.insert(it, Keyframe{t, {}, {}});
}

void ClipRecorder::add_sample(double t, const JointTargets& targets) {
  if (clip_.keyframes.empty() ? t != 0.0 : !(t > clip_.keyframes.back().t)) {
    throw BehaviorError(BehaviorErrc::kInvalidArgument,
                        "recorder samples must start at 0 and increase");
  }
  Keyframe& key = keyframe_at(t);
  for (const auto& [joint, value] : targets) {
    key.targets[joint] = value;
  }
}

void ClipRecorder::add_event(double t, GripEvent event) {
  if (clip_.keyframes.empty() && t != 0.0) {
    add_sample(0.0, {});
  }
  keyframe_at(t).events.push_back(event);
}

namespace {

struct ArmPlan {
  std::vector<std::size_t> chain;        // movable slots of the arm
  std::optional<std::string> gripper;    // prismatic finger joint, if any
};

ArmPlan arm_plan(const kin::KinematicTree& tree, const std::string& tool_link) {
  ArmPlan plan;
  plan.chain = tree.movable_chain_to(tool_link);
  for (const kin::JointSpec& joint : tree.joints()) {
    if (joint.movable() && joint.parent_link == tool_link) {
      plan.gripper = joint.name;
      break;
    }
  }
  return plan;
}

kin::JointVector reach(const kin::KinematicTree& tree, const kin::JointVector& from,
                       const std::string& tool_link, const Eigen::Vector3d& position) {
  kin::IkOptions options;
  options.orientation_weight = 0.0;
  kin::Pose target = kin::Pose::translation(position);
  const kin::IkResult result = kin::ik_solve(tree, from, tool_link, target, options);
  if (!result.converged) {
    throw bad_clip("waypoint (" + std::to_string(position.x()) + ", " +
                   std::to_string(position.y()) + ", " + std::to_string(position.z()) +
                   ") is out of reach for " + tool_link);
  }
  return result.q;
}

class ClipBuilder {
 public:
  ClipBuilder(const kin::KinematicTree& tree, ArmPlan plan, std::string name)
      : tree_(tree), plan_(std::move(plan)) {
    clip_.name = std::move(name);
    clip_.keyframes.push_back(Keyframe{0.0, {}, {}});
  }

  void add(double dt, const kin::JointVector& q, std::optional<double> grip,
           std::vector<GripEvent> events = {}) {
    Keyframe key{clip_.keyframes.back().t + dt, {}, std::move(events)};
    for (std::size_t slot : plan_.chain) {
      key.targets[tree_.movable_joint(slot).name] = q[slot];
    }
    if (grip && plan_.gripper) {
      key.targets[*plan_.gripper] = *grip;
    }
    clip_.keyframes.push_back(std::move(key));
  }

  MotionClip finish() { return std::move(clip_); }

 private:
  const kin::KinematicTree& tree_;
  ArmPlan plan_;
  MotionClip clip_;
};

const Eigen::Vector3d kUp = Eigen::Vector3d::UnitZ();

}  // namespace

MotionClip make_pick_place_clip(const kin::KinematicTree& tree, const kin::JointVector& start,
                                sim::Arm arm, const Eigen::Vector3d& object_position,
                                const std::string& tool_link, const PickPlaceOptions& o) {
  const kin::JointVector q_pre =
      reach(tree, start, tool_link, object_position + o.approach_height * kUp);
  const kin::JointVector q_at = reach(tree, q_pre, tool_link, object_position);
  const kin::JointVector q_lift = reach(tree, q_at, tool_link, object_position + o.lift_height * kUp);

  ClipBuilder b(tree, arm_plan(tree, tool_link), "pick_lift_place");
  b.add(o.move_time, q_pre, o.gripper_open);
  b.add(o.move_time, q_at, o.gripper_open);
  b.add(o.hold_time, q_at, 0.0, {{arm, GripAction::kGrasp}});
  b.add(o.move_time, q_lift, 0.0);
  b.add(o.hold_time, q_lift, 0.0);
  b.add(o.move_time, q_at, 0.0);
  b.add(o.hold_time, q_at, o.gripper_open, {{arm, GripAction::kRelease}});
  b.add(o.move_time, q_pre, o.gripper_open);
  b.add(o.move_time, start, 0.0);
  return b.finish();
}

MotionClip make_pick_clip(const kin::KinematicTree& tree, const kin::JointVector& start,
                          sim::Arm arm, const Eigen::Vector3d& object_position,
                          const std::string& tool_link, const PickPlaceOptions& o) {
  const kin::JointVector q_pre =
      reach(tree, start, tool_link, object_position + o.approach_height * kUp);
  const kin::JointVector q_at = reach(tree, q_pre, tool_link, object_position);
  const kin::JointVector q_lift = reach(tree, q_at, tool_link, object_position + o.lift_height * kUp);

  ClipBuilder b(tree, arm_plan(tree, tool_link), "pick");
  b.add(o.move_time, q_pre, o.gripper_open);
  b.add(o.move_time, q_at, o.gripper_open);
  b.add(o.hold_time, q_at, 0.0, {{arm, GripAction::kGrasp}});
  b.add(o.move_time, q_lift, 0.0);
  return b.finish();
}

MotionClip make_place_clip(const kin::KinematicTree& tree, const kin::JointVector& start,
                           sim::Arm arm, const Eigen::Vector3d& place_position,
                           const std::string& tool_link, const PickPlaceOptions& o) {
  const kin::JointVector q_at = reach(tree, start, tool_link, place_position);
  const kin::JointVector q_pre =
      reach(tree, q_at, tool_link, place_position + o.approach_height * kUp);
  kin::JointVector rest = start;
  const ArmPlan plan = arm_plan(tree, tool_link);
  for (std::size_t slot : plan.chain) {
    rest[slot] = tree.movable_joint(slot).clamp(0.0);
  }

  ClipBuilder b(tree, plan, "place");
  b.add(o.move_time, q_at, 0.0);
  b.add(o.hold_time, q_at, o.gripper_open, {{arm, GripAction::kRelease}});
  b.add(o.move_time, q_pre, o.gripper_open);
  b.add(o.move_time, rest, 0.0);
  return b.finish();
}

}  // namespace sociobot::behaviors
