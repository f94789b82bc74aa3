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

#ifndef SOCIOBOT_SIM_SCENE_HPP_
#define SOCIOBOT_SIM_SCENE_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sociobot/kinematics/pose.hpp"
#include "sociobot/sim/faces.hpp"
#include "sociobot/sim/image.hpp"

namespace sociobot::sim {

enum class SimErrc {
  kBadScene,
  kUnknownObject,
  kUnknownAvatar,
  kObjectAttached,
  kUnknownLink,
  kInvalidArgument,
};

std::string_view to_string(SimErrc code);

class SimError : public std::runtime_error {
 public:
  SimError(SimErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  SimErrc code() const noexcept { return code_; }

 private:
  SimErrc code_;
};

struct Sphere {
  double radius = 0.0;
};
struct Box {
  kin::Vec3 half_extents = kin::Vec3::Zero();
};
using Shape = std::variant<Sphere, Box>;

struct SceneObject {
  std::string id;
  Shape shape;
  Rgb8 color;
  kin::Pose pose;
  bool graspable = false;
  std::optional<std::string> attached_to;  // link name
  kin::Pose attach_offset;                 // object pose in the link frame
};

// Avatars are rendered as a head sphere at `pose.position`.
inline constexpr double kAvatarHeadRadius = 0.09;

struct Avatar {
  std::string id;
  std::string display_name;
  kin::Pose pose;
  Descriptor descriptor;
  Expression expression = Expression::kNeutral;
};

struct Scene {
  std::vector<SceneObject> objects;
  std::vector<Avatar> avatars;
};

// Scene document:
//   {"objects": [{"id", "shape": "sphere"|"box", "radius" | "half_extents",
//                 "color": "red" | [r, g, b], "position": [x, y, z],
//                 "rpy"?: [r, p, y], "graspable"?: bool}],
//    "avatars": [{"id", "name"?, "position", "rpy"?, "expression"?,
//                 "descriptor"?: [16 numbers]}]}
// Missing avatar descriptors come from derived_descriptor(id). Throws
// SimError(kBadScene) naming the offending entry.
Scene parse_scene(std::string_view json_text);
Scene load_scene(const std::filesystem::path& path);

nlohmann::json object_to_json(const SceneObject& object);
nlohmann::json avatar_to_json(const Avatar& avatar);
nlohmann::json pose_to_json(const kin::Pose& pose);
// Accepts {"position": [..], "rpy"?: [..]} or {"position", "orientation": [w, x, y, z]}.
kin::Pose pose_from_json(const nlohmann::json& j);

}  // namespace sociobot::sim

#endif  // SOCIOBOT_SIM_SCENE_HPP_
