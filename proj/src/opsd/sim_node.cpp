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

#include "sociobot/opsd/sim_node.hpp"

#include "sociobot/behaviors/messages.hpp"
#include "sociobot/behaviors/recognition.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/sim/scene.hpp"

namespace sociobot::opsd {

using nlohmann::json;
namespace topics = behaviors::topics;

namespace {

constexpr std::string_view kNodeName = "sim";

std::string string_field(const json& p, const char* field) {
  if (!p.contains(field) || !p[field].is_string()) {
    throw sim::SimError(sim::SimErrc::kInvalidArgument,
                        std::string("world command needs a string '") + field + "'");
  }
  return p[field].get<std::string>();
}

sim::Arm arm_field(const json& p) {
  const auto arm = sim::parse_arm(string_field(p, "arm"));
  if (!arm) {
    throw sim::SimError(sim::SimErrc::kInvalidArgument, "arm must be left or right");
  }
  return *arm;
}

}  // namespace

SimNode::SimNode(sim::World& world, bus::Broker& broker, int camera_period, int snapshot_period)
    : world_(world),
      broker_(broker),
      camera_period_(camera_period),
      snapshot_period_(snapshot_period),
      sub_(broker.subscribe(topics::kJointTarget)) {
  broker_.add_pattern(sub_, topics::kWorldCommand);
}

SimNode::~SimNode() { broker_.unsubscribe(sub_); }

void SimNode::publish(std::string_view topic, std::string_view type, json payload) {
  bus::Envelope env;
  env.topic = std::string(topic);
  env.type = std::string(type);
  env.stamp = world_.time();
  env.payload = std::move(payload);
  broker_.publish(std::move(env), kNodeName);
}

void SimNode::log(std::string_view level, const std::string& text) {
  publish(topics::kConsoleLog, "Log", behaviors::log_payload(level, kNodeName, text));
}

json SimNode::snapshot(std::string_view kind) const {
  json objects = json::object();
  for (const sim::SceneObject& o : world_.objects()) {
    objects[o.id] = sim::object_to_json(o);
  }
  json avatars = json::object();
  for (const sim::Avatar& a : world_.avatars()) {
    avatars[a.id] = sim::avatar_to_json(a);
  }
  const auto held = [&](sim::Arm arm) {
    const auto id = world_.held(arm);
    return id ? json(*id) : json(nullptr);
  };
  return {{"kind", kind},
          {"tick", world_.tick()},
          {"objects", std::move(objects)},
          {"avatars", std::move(avatars)},
          {"held", {{"left", held(sim::Arm::kLeft)}, {"right", held(sim::Arm::kRight)}}}};
}

void SimNode::publish_initial() {
  publish_state();
  publish(topics::kWorldEvent, "WorldEvent", snapshot("snapshot"));
}

void SimNode::apply(const bus::Envelope& env) {
  if (env.topic == topics::kJointTarget) {
    for (const auto& [joint, value] : behaviors::targets_from_json(env.payload)) {
      if (!world_.tree().movable_index(joint)) {
        log("warn", "ignoring target for unknown joint " + joint);
        continue;
      }
      world_.set_target(joint, value);
    }
  } else if (env.topic == topics::kWorldCommand) {
    command(env.payload);
  }
}

void SimNode::command(const json& p) {
  if (!p.is_object()) {
    throw sim::SimError(sim::SimErrc::kInvalidArgument, "world command must be an object");
  }
  const std::string op = string_field(p, "op");
  if (op == "grasp") {
    const sim::Arm arm = arm_field(p);
    const auto id = world_.grasp(arm);
    if (id) {
      events_.push_back("grasp");
    } else {
      log("info", std::string("grasp with ") + std::string(sim::to_string(arm)) +
                      " arm: no object in reach");
      events_.push_back("grasp_failed");
    }
  } else if (op == "release") {
    if (world_.release(arm_field(p))) {
      events_.push_back("release");
    }
  } else if (op == "set_object_pose") {
    world_.set_object_pose(string_field(p, "id"), sim::pose_from_json(p.at("pose")));
    events_.push_back(op);
  } else if (op == "set_avatar_pose") {
    world_.set_avatar_pose(string_field(p, "id"), sim::pose_from_json(p.at("pose")));
    events_.push_back(op);
  } else if (op == "set_avatar_expression") {
    const auto e = sim::parse_expression(string_field(p, "expression"));
    if (!e) {
      throw sim::SimError(sim::SimErrc::kInvalidArgument, "unknown expression");
    }
    world_.set_avatar_expression(string_field(p, "id"), *e);
    events_.push_back(op);
  } else {
    throw sim::SimError(sim::SimErrc::kInvalidArgument, "unknown world command op '" + op + "'");
  }
}

void SimNode::publish_state() {
  publish(topics::kClock, "Clock", {{"time", world_.time()}, {"tick", world_.tick()}});
  publish(topics::kJointState, "JointState",
          behaviors::joint_state_to_json(world_.tick(), world_.q(), world_.qdot(),
                                         world_.target()));
  if (world_.tick() % static_cast<std::uint64_t>(camera_period_) == 0) {
    publish(topics::kCameraImage, "Image", behaviors::image_to_json(world_.render_camera()));
    publish(topics::kFaceObservations, "FaceObservations",
            behaviors::observations_to_json(world_.sense_faces()));
  }
}

void SimNode::tick() {
  for (const bus::Envelope& env : sub_->drain()) {
    try {
      apply(env);
    } catch (const std::exception& e) {
      log("warn", env.topic + ": " + e.what());
    }
  }
  world_.step();
  publish_state();
  std::vector<std::string> events;
  events.swap(events_);
  for (const std::string& kind : events) {
    publish(topics::kWorldEvent, "WorldEvent", snapshot(kind));
  }
  if (events.empty() && world_.tick() % static_cast<std::uint64_t>(snapshot_period_) == 0) {
    publish(topics::kWorldEvent, "WorldEvent", snapshot("snapshot"));
  }
}

}  // namespace sociobot::opsd
