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

#ifndef SOCIOBOT_BEHAVIORS_MESSAGES_HPP_
#define SOCIOBOT_BEHAVIORS_MESSAGES_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sociobot/behaviors/clips.hpp"
#include "sociobot/behaviors/expression.hpp"
#include "sociobot/behaviors/vision.hpp"
#include "sociobot/kinematics/joint_vector.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/sim/image.hpp"
#include "sociobot/sim/world.hpp"

namespace sociobot::behaviors {

// Standard topic table. Payload shapes are listed in the README.
namespace topics {
inline constexpr std::string_view kClock = "/clock";
inline constexpr std::string_view kJointState = "/joint/state";
inline constexpr std::string_view kJointTarget = "/joint/target";
inline constexpr std::string_view kCameraImage = "/camera/image";
inline constexpr std::string_view kCameraDetections = "/camera/detections";
inline constexpr std::string_view kFaceObservations = "/face/observations";
inline constexpr std::string_view kFaceRecognized = "/face/recognized";
inline constexpr std::string_view kSpeechRecognized = "/speech/recognized";
inline constexpr std::string_view kSpeechSay = "/speech/say";
inline constexpr std::string_view kExpressionSet = "/expression/set";
inline constexpr std::string_view kTeleopFrame = "/teleop/frame";
inline constexpr std::string_view kTeleopRecord = "/teleop/record";
inline constexpr std::string_view kConsoleLog = "/console/log";
inline constexpr std::string_view kWorldEvent = "/world/event";
inline constexpr std::string_view kWorldCommand = "/world/command";
inline constexpr std::string_view kClipPlay = "/clip/play";
inline constexpr std::string_view kClipRecorded = "/clip/recorded";
inline constexpr std::string_view kTrackingState = "/tracking/state";
}  // namespace topics

// Throws BehaviorError(kInvalidArgument) on a malformed payload.
struct JointStateMsg {
  std::uint64_t tick = 0;
  kin::JointVector position;
  kin::JointVector velocity;
  kin::JointVector target;
};

nlohmann::json joint_state_to_json(std::uint64_t tick, const kin::JointVector& position,
                                   const kin::JointVector& velocity,
                                   const kin::JointVector& target);
JointStateMsg joint_state_from_json(const nlohmann::json& j, const kin::KinematicTree& tree);

// {"targets": {"joint": value, ...}}
nlohmann::json targets_to_json(const JointTargets& targets);
JointTargets targets_from_json(const nlohmann::json& j);

// {"width", "height", "encoding": "rgb8", "data": base64}
nlohmann::json image_to_json(const sim::Image& image);
sim::Image image_from_json(const nlohmann::json& j);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);  // throws on bad input

using DetectionMap = std::map<sim::ColorClass, std::vector<Detection>>;

// {"detections": {"red": [{"u", "v", "area"}], ...}}
nlohmann::json detections_to_json(const DetectionMap& detections);
DetectionMap detections_from_json(const nlohmann::json& j);

// {"faces": [{"descriptor": [16], "expression_descriptor": [16], "u", "v", "distance"}]}
nlohmann::json observations_to_json(const std::vector<sim::FaceObservation>& faces);
std::vector<sim::FaceObservation> observations_from_json(const nlohmann::json& j);

// {"level", "node", "text"}
nlohmann::json log_payload(std::string_view level, std::string_view node, std::string_view text);

// /world/command grasp or release for one arm.
nlohmann::json grip_command(const GripEvent& event);

}  // namespace sociobot::behaviors

#endif  // SOCIOBOT_BEHAVIORS_MESSAGES_HPP_
