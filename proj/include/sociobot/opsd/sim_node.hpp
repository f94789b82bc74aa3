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

#ifndef SOCIOBOT_OPSD_SIM_NODE_HPP_
#define SOCIOBOT_OPSD_SIM_NODE_HPP_

#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sociobot/bus/broker.hpp"
#include "sociobot/sim/world.hpp"

namespace sociobot::opsd {

// Bus face of the world. Per tick: applies queued /joint/target and
// /world/command envelopes, steps, then publishes /clock and /joint/state;
// every camera period /camera/image and /face/observations; every snapshot
// period and after each scene change a /world/event.
class SimNode {
 public:
  SimNode(sim::World& world, bus::Broker& broker, int camera_period, int snapshot_period);
  ~SimNode();
  SimNode(const SimNode&) = delete;
  SimNode& operator=(const SimNode&) = delete;

  // State at tick 0, before the first step.
  void publish_initial();
  void tick();

  // {kind, tick, objects: {id: object}, avatars: {id: avatar}, held: {left, right}}
  nlohmann::json snapshot(std::string_view kind) const;

 private:
  void apply(const bus::Envelope& env);
  void command(const nlohmann::json& payload);
  void publish(std::string_view topic, std::string_view type, nlohmann::json payload);
  void publish_state();
  void log(std::string_view level, const std::string& text);

  sim::World& world_;
  bus::Broker& broker_;
  int camera_period_;
  int snapshot_period_;
  std::shared_ptr<bus::Subscription> sub_;
  std::vector<std::string> events_;
};

}  // namespace sociobot::opsd

#endif  // SOCIOBOT_OPSD_SIM_NODE_HPP_
