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

#include "sociobot/behaviors/nodes.hpp"

#include <algorithm>
#include <cmath>

#include "sociobot/bus/envelope.hpp"

namespace sociobot::behaviors {

using nlohmann::json;

namespace {

std::optional<Intent> intent_of(const bus::Envelope& env) {
  if (env.topic != topics::kSpeechRecognized) {
    return std::nullopt;
  }
  if (!env.payload.is_object() || !env.payload.contains("text") ||
      !env.payload["text"].is_string()) {
    throw BehaviorError(BehaviorErrc::kInvalidArgument, "speech payload needs a string 'text'");
  }
  return parse_command(env.payload["text"].get<std::string>());
}

std::string acknowledgment(const Intent& intent) {
  struct Visitor {
    std::string operator()(const TrackColor& i) const {
      return "Tracking the " + std::string(sim::to_string(i.color)) + " object.";
    }
    std::string operator()(const TrackFace&) const { return "Looking at you."; }
    std::string operator()(const StopTracking&) const { return "Stopped tracking."; }
    std::string operator()(const Express& i) const {
      return "Showing " + std::string(sim::to_string(i.label)) + ".";
    }
    std::string operator()(const Pick& i) const { return "Picking up the " + i.object_id + "."; }
    std::string operator()(const Place&) const { return "Putting it down."; }
    std::string operator()(const Say& i) const { return i.text; }
    std::string operator()(const Unknown& i) const {
      return "Sorry, I did not understand \"" + i.text + "\".";
    }
  };
  return std::visit(Visitor{}, intent);
}

JointTargets all_targets(const kin::JointVector& q) {
  JointTargets out;
  out.reserve(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    out.emplace_back(q.names()[i], q[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(TrackerNode::Mode mode) {
  switch (mode) {
    case TrackerNode::Mode::kIdle:
      return "idle";
    case TrackerNode::Mode::kColor:
      return "color";
    case TrackerNode::Mode::kFace:
      return "face";
  }
  return "?";
}

Node::Node(std::string name, NodeEnv env)
    : name_(std::move(name)), env_(std::move(env)), sub_(std::make_shared<bus::Subscription>()) {}

Node::~Node() {
  if (env_.broker != nullptr && !sub_->patterns().empty()) {
    env_.broker->unsubscribe(sub_);
  }
}

void Node::subscribe(std::string_view pattern) {
  if (sub_->patterns().empty()) {
    sub_ = env_.broker->subscribe(pattern);
  } else {
    env_.broker->add_pattern(sub_, pattern);
  }
}

void Node::tick(std::uint64_t tick) {
  tick_ = tick;
  for (const bus::Envelope& env : sub_->drain()) {
    try {
      if (env.topic == topics::kJointState) {
        joint_state_ = joint_state_from_json(env.payload, tree());
      }
      on_message(env);
    } catch (const std::exception& e) {
      log("warn", "dropped " + env.topic + " message: " + e.what());
    }
  }
  try {
    on_tick(tick);
  } catch (const std::exception& e) {
    log("error", e.what());
  }
}

void Node::publish(std::string_view topic, std::string_view type, json payload) {
  bus::Envelope env;
  env.topic = std::string(topic);
  env.type = std::string(type);
  env.stamp = env_.broker->now();
  env.payload = std::move(payload);
  env_.broker->publish(std::move(env), name_);
}

void Node::log(std::string_view level, std::string_view text) {
  publish(topics::kConsoleLog, "Log", log_payload(level, name_, text));
}

void Node::say(std::string_view text) {
  publish(topics::kSpeechSay, "Speech", {{"text", text}});
}

void Node::publish_targets(const JointTargets& targets) {
  JointTargets clamped;
  clamped.reserve(targets.size());
  for (const auto& [joint, value] : targets) {
    if (!tree().movable_index(joint)) {
      log("warn", "ignoring target for unknown joint " + joint);
      continue;
    }
    clamped.emplace_back(joint, tree().joint(joint).clamp(value));
  }
  if (!clamped.empty()) {
    publish(topics::kJointTarget, "JointTarget", targets_to_json(clamped));
  }
}

void Node::publish_grip(const GripEvent& event) {
  publish(topics::kWorldCommand, "WorldCommand", grip_command(event));
}

// ---------------------------------------------------------------------------

VisionNode::VisionNode(NodeEnv env, SegmentOptions options)
    : Node("vision", std::move(env)), options_(options) {
  subscribe(topics::kCameraImage);
}

void VisionNode::on_message(const bus::Envelope& env) {
  const sim::Image image = image_from_json(env.payload);
  DetectionMap detections;
  for (sim::ColorClass color : sim::kColorClasses) {
    detections[color] = color_segment(image, color, options_);
  }
  publish(topics::kCameraDetections, "Detections", detections_to_json(detections));
}

// ---------------------------------------------------------------------------

RecognitionNode::RecognitionNode(NodeEnv env, Gallery gallery, double threshold,
                                 double regreet_after)
    : Node("recognition", std::move(env)),
      gallery_(std::move(gallery)),
      threshold_(threshold),
      regreet_after_(regreet_after) {
  subscribe(topics::kFaceObservations);
}

void RecognitionNode::on_message(const bus::Envelope& env) {
  json faces = json::array();
  for (const sim::FaceObservation& obs : observations_from_json(env.payload)) {
    json face = {{"u", obs.centroid.x()},
                 {"v", obs.centroid.y()},
                 {"expression", sim::to_string(classify_expression(obs.expression_descriptor))},
                 {"id", nullptr},
                 {"name", nullptr},
                 {"similarity", nullptr}};
    std::optional<FaceMatch> match;
    try {
      match = recognize_face(obs.descriptor, gallery_, threshold_);
    } catch (const BehaviorError& e) {
      if (e.code() != BehaviorErrc::kEmptyGallery) {
        throw;
      }
      if (!warned_empty_) {
        log("warn", e.what());
        warned_empty_ = true;
      }
    }
    if (match) {
      const auto entry = std::find_if(gallery_.begin(), gallery_.end(),
                                      [&](const FaceGalleryEntry& g) { return g.id == match->id; });
      face["id"] = match->id;
      face["name"] = entry->name;
      face["similarity"] = match->similarity;
      const auto seen = last_seen_.find(match->id);
      if (seen == last_seen_.end() || env.stamp - seen->second > regreet_after_) {
        say("Hello, " + entry->name + "!" + (entry->notes.empty() ? "" : " " + entry->notes));
      }
      last_seen_[match->id] = env.stamp;
    }
    faces.push_back(std::move(face));
  }
  publish(topics::kFaceRecognized, "FaceRecognized", {{"faces", std::move(faces)}});
}

// ---------------------------------------------------------------------------

TrackerNode::TrackerNode(NodeEnv env, TrackingGains gains)
    : Node("tracker", std::move(env)), gains_(gains) {
  subscribe(topics::kSpeechRecognized);
  subscribe(topics::kCameraDetections);
  subscribe(topics::kFaceObservations);
  subscribe(topics::kJointState);
}

void TrackerNode::on_message(const bus::Envelope& env) {
  if (const auto intent = intent_of(env)) {
    if (const auto* track = std::get_if<TrackColor>(&*intent)) {
      mode_ = Mode::kColor;
      color_ = track->color;
    } else if (std::holds_alternative<TrackFace>(*intent)) {
      mode_ = Mode::kFace;
    } else if (std::holds_alternative<StopTracking>(*intent)) {
      mode_ = Mode::kIdle;
      publish(topics::kTrackingState, "TrackingState", {{"mode", "idle"}, {"found", false}});
    }
    return;
  }
  if (mode_ == Mode::kColor && env.topic == topics::kCameraDetections) {
    const DetectionMap detections = detections_from_json(env.payload);
    const auto it = detections.find(color_);
    if (it == detections.end() || it->second.empty()) {
      steer(std::nullopt, env.stamp);
    } else {
      steer(it->second.front().centroid, env.stamp);
    }
  } else if (mode_ == Mode::kFace && env.topic == topics::kFaceObservations) {
    const auto faces = observations_from_json(env.payload);
    if (faces.empty()) {
      steer(std::nullopt, env.stamp);
    } else {
      const auto nearest = std::min_element(
          faces.begin(), faces.end(),
          [](const sim::FaceObservation& a, const sim::FaceObservation& b) {
            return a.distance < b.distance;
          });
      steer(nearest->centroid, env.stamp);
    }
  }
}

void TrackerNode::steer(const std::optional<Eigen::Vector2d>& centroid, double stamp) {
  json state = {{"mode", to_string(mode_)},
                {"target", mode_ == Mode::kColor ? std::string(sim::to_string(color_)) : "face"},
                {"found", centroid.has_value()},
                {"stamp", stamp}};
  if (centroid) {
    const sim::CameraModel& cam = env().camera;
    state["u"] = centroid->x();
    state["v"] = centroid->y();
    state["error_px"] = std::hypot(centroid->x() - cam.cx, centroid->y() - cam.cy);
    if (joint_state()) {
      const GazeJointNames names;
      const GazeState gaze = gaze_state(tree(), joint_state()->position, names);
      const GazeDelta d = track_step(*centroid, cam, gaze, gains_);
      publish_targets({{names.neck_pan, gaze.neck_pan.position + d.neck_pan},
                       {names.neck_tilt, gaze.neck_tilt.position + d.neck_tilt},
                       {names.eyes_pan, gaze.eyes_pan.position + d.eyes_pan},
                       {names.eyes_tilt, gaze.eyes_tilt.position + d.eyes_tilt}});
    }
  }
  publish(topics::kTrackingState, "TrackingState", std::move(state));
}

// ---------------------------------------------------------------------------

ExpressionNode::ExpressionNode(NodeEnv env, double default_duration)
    : Node("expression", std::move(env)), default_duration_(default_duration) {
  subscribe(topics::kExpressionSet);
  subscribe(topics::kSpeechRecognized);
  subscribe(topics::kJointState);
}

void ExpressionNode::on_message(const bus::Envelope& env) {
  if (const auto intent = intent_of(env)) {
    if (const auto* express = std::get_if<Express>(&*intent)) {
      start(express->label, default_duration_);
    }
    return;
  }
  if (env.topic != topics::kExpressionSet) {
    return;
  }
  const json& p = env.payload;
  if (!p.is_object() || !p.contains("label") || !p["label"].is_string()) {
    throw BehaviorError(BehaviorErrc::kInvalidArgument, "expression payload needs a 'label'");
  }
  const auto label = sim::parse_expression(p["label"].get<std::string>());
  if (!label) {
    throw BehaviorError(BehaviorErrc::kInvalidArgument,
                        "unknown expression " + p["label"].get<std::string>());
  }
  double duration = default_duration_;
  if (p.contains("duration")) {
    if (!p["duration"].is_number()) {
      throw BehaviorError(BehaviorErrc::kInvalidArgument, "expression duration must be a number");
    }
    duration = p["duration"].get<double>();
  }
  start(*label, duration);
}

void ExpressionNode::start(sim::Expression label, double duration) {
  JointTargets from = expression_preset(label).targets;
  for (auto& [joint, value] : from) {
    value = joint_state() ? joint_state()->target.at(joint) : 0.0;
  }
  active_.emplace(from, label, duration);
  start_tick_ = current_tick();
}

void ExpressionNode::on_tick(std::uint64_t tick) {
  if (!active_) {
    return;
  }
  const double t = static_cast<double>(tick - start_tick_) * env().dt;
  publish_targets(active_->at(t));
  if (active_->done(t)) {
    active_.reset();
  }
}

// ---------------------------------------------------------------------------

ClipNode::ClipNode(NodeEnv env, std::map<std::string, MotionClip> library,
                   PickPlaceOptions pick_options)
    : Node("clips", std::move(env)),
      library_(std::move(library)),
      pick_options_(pick_options) {
  subscribe(topics::kClipPlay);
  subscribe(topics::kClipRecorded);
  subscribe(topics::kSpeechRecognized);
  subscribe(topics::kWorldEvent);
  subscribe(topics::kJointState);
}

void ClipNode::on_message(const bus::Envelope& env) {
  if (const auto intent = intent_of(env)) {
    handle_intent(*intent);
    return;
  }
  const json& p = env.payload;
  if (env.topic == topics::kWorldEvent) {
    if (p.is_object() && p.contains("objects") && p["objects"].is_object()) {
      for (const auto& [id, object] : p["objects"].items()) {
        const json& pos = object.at("pose").at("position");
        object_positions_[id] = {pos.at(0).get<double>(), pos.at(1).get<double>(),
                                 pos.at(2).get<double>()};
      }
    }
  } else if (env.topic == topics::kClipRecorded) {
    MotionClip clip = clip_from_json(p.at("clip"));
    library_[clip.name] = std::move(clip);
  } else if (env.topic == topics::kClipPlay) {
    if (p.contains("clip")) {
      play(clip_from_json(p["clip"]));
    } else if (p.contains("name") && p["name"].is_string()) {
      const auto it = library_.find(p["name"].get<std::string>());
      if (it == library_.end()) {
        throw BehaviorError(BehaviorErrc::kBadClip, "no clip named " + p["name"].get<std::string>());
      }
      play(it->second);
    } else {
      throw BehaviorError(BehaviorErrc::kBadClip, "clip request needs 'name' or 'clip'");
    }
  }
}

void ClipNode::play(MotionClip clip) {
  validate_clip(clip, tree());
  const std::set<sim::Arm> arms = arms_of(clip);
  for (const Active& a : active_) {
    for (sim::Arm arm : arms) {
      if (a.arms.count(arm) != 0) {
        throw BehaviorError(BehaviorErrc::kClipBusy,
                            "ClipBusy: " + std::string(sim::to_string(arm)) + " arm is playing '" +
                                a.player.clip().name + "'");
      }
    }
  }
  const kin::JointVector start = joint_state() ? joint_state()->target : kin::JointVector(tree());
  log("info", "playing clip '" + clip.name + "'");
  active_.push_back(Active{ClipPlayer(std::move(clip), start), current_tick(), arms});
}

void ClipNode::handle_intent(const Intent& intent) {
  if (const auto* pick = std::get_if<Pick>(&intent)) {
    const auto it = object_positions_.find(pick->object_id);
    if (it == object_positions_.end()) {
      say("I don't see a " + pick->object_id + ".");
      return;
    }
    if (held_) {
      say("I'm already holding the " + held_->object_id + ".");
      return;
    }
    const sim::Arm arm = it->second.y() < 0.0 ? sim::Arm::kRight : sim::Arm::kLeft;
    const std::string& tool = arm == sim::Arm::kLeft ? env().left_tool : env().right_tool;
    const kin::JointVector start = joint_state() ? joint_state()->target : kin::JointVector(tree());
    try {
      play(make_pick_clip(tree(), start, arm, it->second, tool, pick_options_));
    } catch (const BehaviorError& e) {
      say("I can't reach the " + pick->object_id + ".");
      throw;
    }
    held_ = Held{arm, pick->object_id, it->second};
  } else if (std::holds_alternative<Place>(intent)) {
    if (!held_) {
      say("I'm not holding anything.");
      return;
    }
    const std::string& tool = held_->arm == sim::Arm::kLeft ? env().left_tool : env().right_tool;
    const kin::JointVector start = joint_state() ? joint_state()->target : kin::JointVector(tree());
    play(make_place_clip(tree(), start, held_->arm, held_->origin, tool, pick_options_));
    held_.reset();
  }
}

void ClipNode::on_tick(std::uint64_t tick) {
  for (Active& a : active_) {
    const double t = static_cast<double>(tick - a.start_tick) * env().dt;
    const ClipPlayer::Sample s = a.player.sample(t);
    publish_targets(s.targets);
    for (const GripEvent& e : s.events) {
      publish_grip(e);
    }
  }
  const auto done = std::remove_if(active_.begin(), active_.end(),
                                   [](const Active& a) { return a.player.finished(); });
  for (auto it = done; it != active_.end(); ++it) {
    log("info", "clip '" + it->player.clip().name + "' finished");
  }
  active_.erase(done, active_.end());
}

// ---------------------------------------------------------------------------

TeleopNode::TeleopNode(NodeEnv env, TeleopNames names)
    : Node("teleop", std::move(env)), teleop_(tree(), std::move(names)) {
  subscribe(topics::kTeleopFrame);
  subscribe(topics::kTeleopRecord);
  subscribe(topics::kJointState);
}

void TeleopNode::on_message(const bus::Envelope& env) {
  if (env.topic == topics::kTeleopRecord) {
    const std::string action = env.payload.value("action", "");
    if (action == "start") {
      recorder_.emplace(env.payload.value("name", "teleop_" + std::to_string(current_tick())));
      record_start_ = current_tick();
      log("info", "recording '" + recorder_->clip().name + "'");
    } else if (action == "stop") {
      if (!recorder_) {
        throw BehaviorError(BehaviorErrc::kInvalidArgument, "not recording");
      }
      MotionClip clip = recorder_->finish();
      recorder_.reset();
      log("info", "recorded '" + clip.name + "' with " + std::to_string(clip.keyframes.size()) +
                      " keyframes");
      publish(topics::kClipRecorded, "Clip", {{"clip", clip_to_json(clip)}});
    } else {
      throw BehaviorError(BehaviorErrc::kInvalidArgument, "record action must be start or stop");
    }
    return;
  }
  if (env.topic != topics::kTeleopFrame) {
    return;
  }
  const TeleopFrame frame = teleop_frame_from_json(env.payload);
  if (!joint_state()) {
    if (!warned_no_state_) {
      log("warn", "teleop frame before any joint state");
      warned_no_state_ = true;
    }
    return;
  }
  const TeleopOutput out = teleop_.step(frame, joint_state()->position);
  publish_targets(out.targets);
  for (const GripEvent& e : out.events) {
    publish_grip(e);
    if (recorder_) {
      recorder_->add_event(static_cast<double>(current_tick() - record_start_) * Node::env().dt, e);
    }
  }
}

void TeleopNode::on_tick(std::uint64_t tick) {
  if (!recorder_ || !joint_state()) {
    return;
  }
  const std::uint64_t elapsed = tick - record_start_;
  if (elapsed % static_cast<std::uint64_t>(env().camera_period) == 0) {
    recorder_->add_sample(static_cast<double>(elapsed) * env().dt,
                          all_targets(joint_state()->target));
  }
}

// ---------------------------------------------------------------------------

DialogNode::DialogNode(NodeEnv env) : Node("dialog", std::move(env)) {
  subscribe(topics::kSpeechRecognized);
}

void DialogNode::on_message(const bus::Envelope& env) {
  const auto intent = intent_of(env);
  if (!intent) {
    return;
  }
  if (const auto* unknown = std::get_if<Unknown>(&*intent)) {
    log("info", "unrecognized command \"" + unknown->text + "\"");
  }
  say(acknowledgment(*intent));
}

}  // namespace sociobot::behaviors
