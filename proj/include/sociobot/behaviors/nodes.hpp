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

#ifndef SOCIOBOT_BEHAVIORS_NODES_HPP_
#define SOCIOBOT_BEHAVIORS_NODES_HPP_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sociobot/behaviors/clips.hpp"
#include "sociobot/behaviors/command.hpp"
#include "sociobot/behaviors/expression.hpp"
#include "sociobot/behaviors/messages.hpp"
#include "sociobot/behaviors/recognition.hpp"
#include "sociobot/behaviors/teleop.hpp"
#include "sociobot/behaviors/tracking.hpp"
#include "sociobot/behaviors/vision.hpp"
#include "sociobot/bus/broker.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/sim/camera.hpp"

namespace sociobot::behaviors {

struct NodeEnv {
  bus::Broker* broker = nullptr;
  const kin::KinematicTree* tree = nullptr;
  sim::CameraModel camera;
  double dt = 1.0 / 120.0;
  int camera_period = 6;  // ticks between camera frames
  std::string left_tool = "l_gripper";
  std::string right_tool = "r_gripper";
};

// A behavior attached to the broker. The runtime calls tick() once per
// simulation step, after the world has published its state; nodes drain
// their subscriptions there and publish results on the same tick.
class Node {
 public:
  Node(std::string name, NodeEnv env);
  virtual ~Node();
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  const std::string& name() const { return name_; }
  void tick(std::uint64_t tick);

 protected:
  virtual void on_message(const bus::Envelope& env) = 0;
  virtual void on_tick(std::uint64_t /*tick*/) {}

  void subscribe(std::string_view pattern);
  void publish(std::string_view topic, std::string_view type, nlohmann::json payload);
  void log(std::string_view level, std::string_view text);
  void say(std::string_view text);
  // Clamps to limits; unknown joints are dropped with a warning.
  void publish_targets(const JointTargets& targets);
  void publish_grip(const GripEvent& event);

  // Latest /joint/state seen by this node, if it subscribes to it.
  const std::optional<JointStateMsg>& joint_state() const { return joint_state_; }

  std::uint64_t current_tick() const { return tick_; }
  const NodeEnv& env() const { return env_; }
  const kin::KinematicTree& tree() const { return *env_.tree; }

 private:
  std::string name_;
  NodeEnv env_;
  std::shared_ptr<bus::Subscription> sub_;
  std::optional<JointStateMsg> joint_state_;
  std::uint64_t tick_ = 0;
};

// /camera/image -> /camera/detections for every color class.
class VisionNode : public Node {
 public:
  explicit VisionNode(NodeEnv env, SegmentOptions options = {});

 protected:
  void on_message(const bus::Envelope& env) override;

 private:
  SegmentOptions options_;
};

// /face/observations -> /face/recognized, greeting people by name on
// /speech/say the first time they are seen (and again after `regreet_after`).
class RecognitionNode : public Node {
 public:
  RecognitionNode(NodeEnv env, Gallery gallery, double threshold = kRecognitionThreshold,
                  double regreet_after = 30.0);

 protected:
  void on_message(const bus::Envelope& env) override;

 private:
  Gallery gallery_;
  double threshold_;
  double regreet_after_;
  std::map<std::string, double> last_seen_;
  bool warned_empty_ = false;
};

// Color and face visual servoing on the camera stream; driven by
// /speech/recognized intents.
class TrackerNode : public Node {
 public:
  enum class Mode { kIdle, kColor, kFace };

  explicit TrackerNode(NodeEnv env, TrackingGains gains = {});
  Mode mode() const { return mode_; }

 protected:
  void on_message(const bus::Envelope& env) override;

 private:
  void steer(const std::optional<Eigen::Vector2d>& centroid, double stamp);

  TrackingGains gains_;
  Mode mode_ = Mode::kIdle;
  sim::ColorClass color_ = sim::ColorClass::kRed;
};

// /expression/set and "show <label>" -> smoothed face joint targets.
class ExpressionNode : public Node {
 public:
  explicit ExpressionNode(NodeEnv env, double default_duration = kDefaultExpressionDuration);

 protected:
  void on_message(const bus::Envelope& env) override;
  void on_tick(std::uint64_t tick) override;

 private:
  void start(sim::Expression label, double duration);

  double default_duration_;
  std::optional<ExpressionTransition> active_;
  std::uint64_t start_tick_ = 0;
};

// Plays motion clips (/clip/play, pick/place commands), one per arm.
class ClipNode : public Node {
 public:
  ClipNode(NodeEnv env, std::map<std::string, MotionClip> library,
           PickPlaceOptions pick_options = {});

  bool busy() const { return !active_.empty(); }

 protected:
  void on_message(const bus::Envelope& env) override;
  void on_tick(std::uint64_t tick) override;

 private:
  struct Active {
    ClipPlayer player;
    std::uint64_t start_tick;
    std::set<sim::Arm> arms;
  };
  struct Held {
    sim::Arm arm;
    std::string object_id;
    Eigen::Vector3d origin;
  };

  void play(MotionClip clip);
  void handle_intent(const Intent& intent);

  std::map<std::string, MotionClip> library_;
  PickPlaceOptions pick_options_;
  std::vector<Active> active_;
  std::map<std::string, Eigen::Vector3d> object_positions_;
  std::optional<Held> held_;
};

// /teleop/frame -> neck and arm targets plus grip commands; /teleop/record
// {"action": "start" | "stop", "name"?} captures the joint-target stream
// at the camera rate and publishes the clip on /clip/recorded.
class TeleopNode : public Node {
 public:
  explicit TeleopNode(NodeEnv env, TeleopNames names = {});

  bool recording() const { return recorder_.has_value(); }

 protected:
  void on_message(const bus::Envelope& env) override;
  void on_tick(std::uint64_t tick) override;

 private:
  Teleoperator teleop_;
  std::optional<ClipRecorder> recorder_;
  std::uint64_t record_start_ = 0;
  bool warned_no_state_ = false;
};

// Acknowledges every /speech/recognized utterance on /speech/say.
class DialogNode : public Node {
 public:
  explicit DialogNode(NodeEnv env);

 protected:
  void on_message(const bus::Envelope& env) override;
};

std::string_view to_string(TrackerNode::Mode mode);

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_NODES_HPP_
