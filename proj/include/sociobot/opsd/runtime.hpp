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

#ifndef SOCIOBOT_OPSD_RUNTIME_HPP_
#define SOCIOBOT_OPSD_RUNTIME_HPP_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sociobot/behaviors/clips.hpp"
#include "sociobot/behaviors/nodes.hpp"
#include "sociobot/bus/broker.hpp"
#include "sociobot/opsd/config.hpp"
#include "sociobot/opsd/sim_node.hpp"
#include "sociobot/sim/world.hpp"

namespace sociobot::opsd {

// Clips in `dir` (*.json, sorted by file name) keyed by clip name.
std::map<std::string, behaviors::MotionClip> load_clip_library(const std::filesystem::path& dir,
                                                               const kin::KinematicTree& tree);

// The whole robot in one process: world, broker, sim node and behavior
// nodes, advanced in lockstep by step().
//
// Envelopes published from any thread other than the one driving step()
// (network sessions) are held and released at the start of the next step,
// re-stamped with the step time. Every input therefore lands on a tick
// boundary, which is what makes a recorded log replayable.
class Runtime {
 public:
  explicit Runtime(Config config);
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  const Config& config() const { return config_; }
  bus::Broker& broker() { return broker_; }
  sim::World& world() { return *world_; }
  const sim::World& world() const { return *world_; }
  const kin::KinematicTree& tree() const { return world_->tree(); }

  std::uint64_t tick() const { return world_->tick(); }
  double time() const { return world_->time(); }

  // Publishes the tick-0 state on first call; releases held inputs, runs
  // the sim node, then every behavior node.
  void step();
  void run_until(double time);

  // Publishes on the caller's thread, stamped with the current time.
  bus::Envelope inject(bus::Envelope env, std::string_view publisher = "scenario");

  // JSON lines: a header {"sociobot_log": 1, "seed", "dt"} and then one
  // {"publisher", "envelope"} per publish in broker order. nullptr stops.
  void set_log(std::ostream* out);

  std::size_t held_inputs() const;

 private:
  struct Held {
    bus::Envelope envelope;
    std::string publisher;
  };

  void release_held();

  Config config_;
  bus::Broker broker_;
  std::unique_ptr<sim::World> world_;
  std::unique_ptr<SimNode> sim_node_;
  std::vector<std::unique_ptr<behaviors::Node>> nodes_;
  bool started_ = false;

  std::atomic<double> clock_{0.0};
  std::atomic<std::thread::id> driver_;
  mutable std::mutex held_mutex_;
  std::vector<Held> held_;
  std::ostream* log_ = nullptr;
};

}  // namespace sociobot::opsd

#endif  // SOCIOBOT_OPSD_RUNTIME_HPP_
