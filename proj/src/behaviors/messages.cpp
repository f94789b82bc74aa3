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

#include "sociobot/behaviors/messages.hpp"

#include <algorithm>
#include <cmath>

#include <boost/beast/core/detail/base64.hpp>

#include "sociobot/behaviors/recognition.hpp"

namespace sociobot::behaviors {

using nlohmann::json;

namespace {

BehaviorError bad(const std::string& what) {
  return BehaviorError(BehaviorErrc::kInvalidArgument, what);
}

double number(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field) || !j[field].is_number()) {
    throw bad(std::string("missing numeric field '") + field + "'");
  }
  return j[field].get<double>();
}

json descriptor_json(const sim::Descriptor& d) {
  json out = json::array();
  for (int i = 0; i < sim::kDescriptorDim; ++i) {
    out.push_back(d[i]);
  }
  return out;
}

sim::Descriptor descriptor_from(const json& j) {
  if (!j.is_array() || j.size() != sim::kDescriptorDim) {
    throw bad("descriptor must have 16 numbers");
  }
  sim::Descriptor d;
  for (int i = 0; i < sim::kDescriptorDim; ++i) {
    const json& x = j[static_cast<std::size_t>(i)];
    if (!x.is_number()) {
      throw bad("descriptor must have 16 numbers");
    }
    d[i] = x.get<double>();
  }
  return d;
}

}  // namespace

json joint_state_to_json(std::uint64_t tick, const kin::JointVector& position,
                         const kin::JointVector& velocity, const kin::JointVector& target) {
  return {{"name", position.names()},
          {"position", std::vector<double>(position.values().begin(), position.values().end())},
          {"velocity", std::vector<double>(velocity.values().begin(), velocity.values().end())},
          {"target", std::vector<double>(target.values().begin(), target.values().end())},
          {"tick", tick}};
}

JointStateMsg joint_state_from_json(const json& j, const kin::KinematicTree& tree) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_array()) {
    throw bad("joint state needs a 'name' list");
  }
  JointStateMsg msg{j.value("tick", std::uint64_t{0}), kin::JointVector(tree),
                    kin::JointVector(tree), kin::JointVector(tree)};
  const json& names = j["name"];
  const auto fill = [&](const char* field, kin::JointVector& out) {
    if (!j.contains(field)) {
      return;
    }
    const json& values = j[field];
    if (!values.is_array() || values.size() != names.size()) {
      throw bad(std::string("joint state '") + field + "' does not match 'name'");
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!names[i].is_string() || !values[i].is_number()) {
        throw bad("joint state entries must be names and numbers");
      }
      const std::string joint = names[i].get<std::string>();
      if (out.contains(joint)) {
        out.set(joint, values[i].get<double>());
      }
    }
  };
  fill("position", msg.position);
  fill("velocity", msg.velocity);
  fill("target", msg.target);
  return msg;
}

json targets_to_json(const JointTargets& targets) {
  json t = json::object();
  for (const auto& [joint, value] : targets) {
    t[joint] = value;
  }
  return {{"targets", std::move(t)}};
}

JointTargets targets_from_json(const json& j) {
  if (!j.is_object() || !j.contains("targets") || !j["targets"].is_object()) {
    throw bad("payload needs a 'targets' object");
  }
  JointTargets out;
  for (const auto& [joint, value] : j["targets"].items()) {
    if (!value.is_number() || !std::isfinite(value.get<double>())) {
      throw bad("target for " + joint + " is not a finite number");
    }
    out.emplace_back(joint, value.get<double>());
  }
  return out;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  namespace b64 = boost::beast::detail::base64;
  if (text.size() % 4 != 0) {
    throw bad("base64 length must be a multiple of 4");
  }
  std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
  const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  // Decoding stops at the first '='; only up to two trailing pads may follow.
  const std::size_t pad = text.size() - text.find_last_not_of('=') - 1;
  if (pad > 2 || read != text.size() - std::min(pad, text.size())) {
    throw bad("invalid base64");
  }
  out.resize(written);
  return out;
}

json image_to_json(const sim::Image& image) {
  return {{"width", image.width()},
          {"height", image.height()},
          {"encoding", "rgb8"},
          {"data", base64_encode(image.bytes())}};
}

sim::Image image_from_json(const json& j) {
  const double w = number(j, "width");
  const double h = number(j, "height");
  if (j.value("encoding", "") != "rgb8" || !j.contains("data") || !j["data"].is_string()) {
    throw bad("image must be rgb8 with base64 'data'");
  }
  if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h) || w * h > 1 << 24) {
    throw bad("bad image size");
  }
  sim::Image image(static_cast<int>(w), static_cast<int>(h));
  std::vector<std::uint8_t> bytes = base64_decode(j["data"].get<std::string>());
  if (bytes.size() != image.bytes().size()) {
    throw bad("image data does not match width x height x 3");
  }
  image.bytes() = std::move(bytes);
  return image;
}

json detections_to_json(const DetectionMap& detections) {
  json out = json::object();
  for (const auto& [color, list] : detections) {
    json items = json::array();
    for (const Detection& d : list) {
      items.push_back({{"u", d.centroid.x()}, {"v", d.centroid.y()}, {"area", d.area}});
    }
    out[std::string(sim::to_string(color))] = std::move(items);
  }
  return {{"detections", std::move(out)}};
}

DetectionMap detections_from_json(const json& j) {
  if (!j.is_object() || !j.contains("detections") || !j["detections"].is_object()) {
    throw bad("payload needs a 'detections' object");
  }
  DetectionMap out;
  for (const auto& [name, items] : j["detections"].items()) {
    const auto color = sim::parse_color_class(name);
    if (!color || !items.is_array()) {
      throw bad("unknown color class " + name);
    }
    auto& list = out[*color];
    for (const json& item : items) {
      list.push_back(Detection{*color, {number(item, "u"), number(item, "v")},
                               static_cast<int>(number(item, "area"))});
    }
  }
  return out;
}

json observations_to_json(const std::vector<sim::FaceObservation>& faces) {
  json out = json::array();
  for (const sim::FaceObservation& f : faces) {
    out.push_back({{"descriptor", descriptor_json(f.descriptor)},
                   {"expression_descriptor", descriptor_json(f.expression_descriptor)},
                   {"u", f.centroid.x()},
                   {"v", f.centroid.y()},
                   {"distance", f.distance}});
  }
  return {{"faces", std::move(out)}};
}

std::vector<sim::FaceObservation> observations_from_json(const json& j) {
  if (!j.is_object() || !j.contains("faces") || !j["faces"].is_array()) {
    throw bad("payload needs a 'faces' list");
  }
  std::vector<sim::FaceObservation> out;
  for (const json& f : j["faces"]) {
    if (!f.is_object() || !f.contains("descriptor") || !f.contains("expression_descriptor")) {
      throw bad("face observation needs both descriptors");
    }
    sim::FaceObservation o;
    o.descriptor = descriptor_from(f["descriptor"]);
    o.expression_descriptor = descriptor_from(f["expression_descriptor"]);
    o.centroid = {number(f, "u"), number(f, "v")};
    o.distance = number(f, "distance");
    out.push_back(std::move(o));
  }
  return out;
}

json log_payload(std::string_view level, std::string_view node, std::string_view text) {
  return {{"level", level}, {"node", node}, {"text", text}};
}

json grip_command(const GripEvent& event) {
  return {{"op", to_string(event.action)}, {"arm", sim::to_string(event.arm)}};
}

}  // namespace sociobot::behaviors
