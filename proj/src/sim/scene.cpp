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

#include "sociobot/sim/scene.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sociobot::sim {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw SimError(SimErrc::kBadScene, where + ": " + what);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    bad(where, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    bad(where, "non-finite number");
  }
  return v;
}

kin::Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    bad(where, "expected [x, y, z]");
  }
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

Rgb8 color(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto c = parse_color_class(j.get<std::string>());
    if (!c) {
      bad(where, "unknown color '" + j.get<std::string>() + "'");
    }
    return reference_color(*c);
  }
  if (!j.is_array() || j.size() != 3) {
    bad(where, "expected a color name or [r, g, b]");
  }
  Rgb8 out;
  std::uint8_t* channels[] = {&out.r, &out.g, &out.b};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 255) {
      bad(where, "color channels must be integers in [0, 255]");
    }
    *channels[i] = static_cast<std::uint8_t>(j[i].get<int>());
  }
  return out;
}

kin::Pose pose_at(const json& entry, const std::string& where) {
  if (!entry.contains("position")) {
    bad(where, "missing 'position'");
  }
  kin::Vec3 rpy = kin::Vec3::Zero();
  if (entry.contains("rpy")) {
    rpy = vec3(entry["rpy"], where + ".rpy");
  }
  return kin::Pose::from_xyz_rpy(vec3(entry["position"], where + ".position"), rpy);
}

std::string id_of(const json& entry, const std::string& where) {
  if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string() ||
      entry["id"].get<std::string>().empty()) {
    bad(where, "missing string 'id'");
  }
  return entry["id"].get<std::string>();
}

SceneObject parse_object(const json& entry, const std::string& where) {
  SceneObject o;
  o.id = id_of(entry, where);
  const std::string at = where + " (" + o.id + ")";
  const std::string shape = entry.value("shape", "");
  if (shape == "sphere") {
    const double r = number(entry.value("radius", json()), at + ".radius");
    if (r <= 0.0) {
      bad(at, "radius must be positive");
    }
    o.shape = Sphere{r};
  } else if (shape == "box") {
    const kin::Vec3 h = vec3(entry.value("half_extents", json()), at + ".half_extents");
    if ((h.array() <= 0.0).any()) {
      bad(at, "half_extents must be positive");
    }
    o.shape = Box{h};
  } else {
    bad(at, "shape must be 'sphere' or 'box'");
  }
  o.color = color(entry.value("color", json()), at + ".color");
  o.pose = pose_at(entry, at);
  if (entry.contains("graspable")) {
    if (!entry["graspable"].is_boolean()) {
      bad(at, "graspable must be a boolean");
    }
    o.graspable = entry["graspable"].get<bool>();
  }
  return o;
}

Avatar parse_avatar(const json& entry, const std::string& where) {
  Avatar a;
  a.id = id_of(entry, where);
  const std::string at = where + " (" + a.id + ")";
  a.display_name = entry.value("name", a.id);
  a.pose = pose_at(entry, at);
  if (entry.contains("expression")) {
    const auto e = parse_expression(entry.value("expression", ""));
    if (!e) {
      bad(at, "unknown expression");
    }
    a.expression = *e;
  }
  if (entry.contains("descriptor")) {
    const json& d = entry["descriptor"];
    if (!d.is_array() || d.size() != kDescriptorDim) {
      bad(at, "descriptor must have 16 numbers");
    }
    for (int i = 0; i < kDescriptorDim; ++i) {
      a.descriptor[i] = number(d[static_cast<std::size_t>(i)], at + ".descriptor");
    }
    if (a.descriptor.norm() < 1e-9) {
      bad(at, "descriptor must be non-zero");
    }
    a.descriptor.normalize();
  } else {
    a.descriptor = derived_descriptor(a.id);
  }
  return a;
}

json vec_json(const kin::Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::string_view to_string(SimErrc code) {
  switch (code) {
    case SimErrc::kBadScene:
      return "BadScene";
    case SimErrc::kUnknownObject:
      return "UnknownObject";
    case SimErrc::kUnknownAvatar:
      return "UnknownAvatar";
    case SimErrc::kObjectAttached:
      return "ObjectAttached";
    case SimErrc::kUnknownLink:
      return "UnknownLink";
    case SimErrc::kInvalidArgument:
      return "InvalidArgument";
  }
  return "?";
}

Scene parse_scene(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad("scene", e.what());
  }
  if (!doc.is_object()) {
    bad("scene", "top level must be an object");
  }
  Scene scene;
  std::set<std::string> ids;
  if (doc.contains("objects")) {
    if (!doc["objects"].is_array()) {
      bad("objects", "must be a list");
    }
    for (std::size_t i = 0; i < doc["objects"].size(); ++i) {
      scene.objects.push_back(
          parse_object(doc["objects"][i], "objects[" + std::to_string(i) + "]"));
      if (!ids.insert(scene.objects.back().id).second) {
        bad("objects[" + std::to_string(i) + "]", "duplicate id " + scene.objects.back().id);
      }
    }
  }
  if (doc.contains("avatars")) {
    if (!doc["avatars"].is_array()) {
      bad("avatars", "must be a list");
    }
    for (std::size_t i = 0; i < doc["avatars"].size(); ++i) {
      scene.avatars.push_back(
          parse_avatar(doc["avatars"][i], "avatars[" + std::to_string(i) + "]"));
      if (!ids.insert(scene.avatars.back().id).second) {
        bad("avatars[" + std::to_string(i) + "]", "duplicate id " + scene.avatars.back().id);
      }
    }
  }
  return scene;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SimError(SimErrc::kBadScene, "cannot open scene file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scene(text.str());
}

json pose_to_json(const kin::Pose& pose) {
  const kin::UnitQuat& q = pose.orientation;
  return {{"position", vec_json(pose.position)},
          {"orientation", json::array({q.w(), q.x(), q.y(), q.z()})}};
}

kin::Pose pose_from_json(const json& j) {
  if (!j.is_object()) {
    bad("pose", "expected an object");
  }
  if (j.contains("orientation")) {
    const json& o = j["orientation"];
    if (!o.is_array() || o.size() != 4) {
      bad("pose.orientation", "expected [w, x, y, z]");
    }
    try {
      return {vec3(j.value("position", json()), "pose.position"),
              kin::make_unit_quat(number(o[0], "pose.orientation"),
                                  number(o[1], "pose.orientation"),
                                  number(o[2], "pose.orientation"),
                                  number(o[3], "pose.orientation"))};
    } catch (const std::invalid_argument& e) {
      bad("pose.orientation", e.what());
    }
  }
  return pose_at(j, "pose");
}

json object_to_json(const SceneObject& object) {
  json j = {{"id", object.id},
            {"color", json::array({object.color.r, object.color.g, object.color.b})},
            {"pose", pose_to_json(object.pose)},
            {"graspable", object.graspable},
            {"attached_to", object.attached_to ? json(*object.attached_to) : json(nullptr)}};
  if (const auto* s = std::get_if<Sphere>(&object.shape)) {
    j["shape"] = "sphere";
    j["radius"] = s->radius;
  } else {
    j["shape"] = "box";
    j["half_extents"] = vec_json(std::get<Box>(object.shape).half_extents);
  }
  return j;
}

json avatar_to_json(const Avatar& avatar) {
  return {{"id", avatar.id},
          {"name", avatar.display_name},
          {"pose", pose_to_json(avatar.pose)},
          {"expression", to_string(avatar.expression)}};
}

}  // namespace sociobot::sim
