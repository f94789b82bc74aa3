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

#include "sociobot/kinematics/urdf.hpp"

#include <expat.h>

#include <charconv>
#include <climits>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

namespace sociobot::kin {
namespace {

constexpr int kMaxDepth = 64;

struct XmlElement {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlElement> children;
  long line = 0;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) {
        return &v;
      }
    }
    return nullptr;
  }
};

struct ParseState {
  XML_Parser parser = nullptr;
  XmlElement root;
  bool have_root = false;
  std::vector<XmlElement*> stack;
  std::string error;
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* state = static_cast<ParseState*>(user);
  if (static_cast<int>(state->stack.size()) >= kMaxDepth) {
    state->error = "elements nested deeper than " + std::to_string(kMaxDepth);
    XML_StopParser(state->parser, XML_FALSE);
    return;
  }
  XmlElement element;
  element.name = name;
  element.line = static_cast<long>(XML_GetCurrentLineNumber(state->parser));
  for (const XML_Char** a = attrs; a[0] != nullptr; a += 2) {
    element.attributes.emplace_back(a[0], a[1]);
  }
  XmlElement* placed = nullptr;
  if (state->stack.empty()) {
    state->root = std::move(element);
    state->have_root = true;
    placed = &state->root;
  } else {
    state->stack.back()->children.push_back(std::move(element));
    placed = &state->stack.back()->children.back();
  }
  state->stack.push_back(placed);
}

void on_end(void* user, const XML_Char* /*name*/) {
  auto* state = static_cast<ParseState*>(user);
  if (!state->stack.empty()) {
    state->stack.pop_back();
  }
}

XmlElement parse_xml(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(INT_MAX)) {
    throw KinematicsError(KinematicsErrc::kMalformedXml, "document too large");
  }
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) {
    throw std::bad_alloc();
  }
  ParseState state;
  state.parser = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), &on_start, &on_end);
  const XML_Status status =
      XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), XML_TRUE);
  if (status != XML_STATUS_OK) {
    std::ostringstream msg;
    msg << "line " << XML_GetCurrentLineNumber(parser.get()) << ": ";
    if (!state.error.empty()) {
      msg << state.error;
    } else {
      msg << XML_ErrorString(XML_GetErrorCode(parser.get()));
    }
    throw KinematicsError(KinematicsErrc::kMalformedXml, msg.str());
  }
  if (!state.have_root) {
    throw KinematicsError(KinematicsErrc::kMalformedXml, "empty document");
  }
  return std::move(state.root);
}

[[noreturn]] void malformed(const XmlElement& at, const std::string& what) {
  throw KinematicsError(KinematicsErrc::kMalformedXml,
                        "line " + std::to_string(at.line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(const XmlElement& at, std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    malformed(at, "attribute '" + std::string(key) + "' is not a finite number");
  }
  return value;
}

Vec3 parse_vec3(const XmlElement& at, std::string_view key, std::string_view text) {
  Vec3 out;
  int count = 0;
  std::size_t pos = 0;
  while (true) {
    pos = text.find_first_not_of(" \t\r\n", pos);
    if (pos == std::string_view::npos) {
      break;
    }
    const std::size_t stop = std::min(text.find_first_of(" \t\r\n", pos), text.size());
    if (count == 3) {
      malformed(at, "attribute '" + std::string(key) + "' needs exactly 3 numbers");
    }
    out[count++] = parse_number(at, key, text.substr(pos, stop - pos));
    pos = stop;
  }
  if (count != 3) {
    malformed(at, "attribute '" + std::string(key) + "' needs exactly 3 numbers");
  }
  return out;
}

const std::string& required_attribute(const XmlElement& at, std::string_view key) {
  const std::string* value = at.attribute(key);
  if (value == nullptr) {
    malformed(at, "<" + at.name + "> is missing attribute '" + std::string(key) + "'");
  }
  return *value;
}

std::optional<double> optional_number(const XmlElement& at, std::string_view key) {
  if (const std::string* value = at.attribute(key)) {
    return parse_number(at, key, *value);
  }
  return std::nullopt;
}

void warn(std::vector<std::string>& warnings, const XmlElement& element,
          std::string_view context) {
  warnings.push_back("line " + std::to_string(element.line) + ": ignoring unsupported <" +
                     element.name + "> in " + std::string(context));
}

JointKind parse_kind(const XmlElement& at, const std::string& type) {
  if (type == "revolute") return JointKind::kRevolute;
  if (type == "continuous") return JointKind::kContinuous;
  if (type == "prismatic") return JointKind::kPrismatic;
  if (type == "fixed") return JointKind::kFixed;
  throw KinematicsError(KinematicsErrc::kUnknownJointKind,
                        "line " + std::to_string(at.line) + ": unsupported joint type '" +
                            type + "'");
}

JointSpec parse_joint(const XmlElement& element, std::vector<std::string>& warnings) {
  JointSpec joint;
  joint.name = required_attribute(element, "name");
  joint.kind = parse_kind(element, required_attribute(element, "type"));
  bool have_parent = false;
  bool have_child = false;
  bool have_origin = false;
  bool have_axis = false;
  const std::string context = "joint '" + joint.name + "'";
  for (const XmlElement& child : element.children) {
    if (child.name == "origin" && !have_origin) {
      have_origin = true;
      Vec3 xyz = Vec3::Zero();
      Vec3 rpy = Vec3::Zero();
      if (const std::string* v = child.attribute("xyz")) xyz = parse_vec3(child, "xyz", *v);
      if (const std::string* v = child.attribute("rpy")) rpy = parse_vec3(child, "rpy", *v);
      joint.origin = Pose::from_xyz_rpy(xyz, rpy);
    } else if (child.name == "axis" && !have_axis) {
      have_axis = true;
      joint.axis = parse_vec3(child, "xyz", required_attribute(child, "xyz"));
    } else if (child.name == "parent" && !have_parent) {
      have_parent = true;
      joint.parent_link = required_attribute(child, "link");
    } else if (child.name == "child" && !have_child) {
      have_child = true;
      joint.child_link = required_attribute(child, "link");
    } else if (child.name == "limit" && !joint.limits) {
      JointLimits limits;
      limits.lower = optional_number(child, "lower");
      limits.upper = optional_number(child, "upper");
      // URDF defaults a missing bound to zero.
      if (!limits.lower) limits.lower = 0.0;
      if (!limits.upper) limits.upper = 0.0;
      limits.max_velocity =
          parse_number(child, "velocity", required_attribute(child, "velocity"));
      limits.max_effort = parse_number(child, "effort", required_attribute(child, "effort"));
      if (limits.max_velocity < 0.0 || limits.max_effort < 0.0) {
        malformed(child, "velocity and effort limits must be non-negative");
      }
      joint.limits = limits;
    } else {
      warn(warnings, child, context);
    }
  }
  if (!have_parent || !have_child) {
    malformed(element, context + " needs both <parent> and <child>");
  }
  if ((joint.kind == JointKind::kRevolute || joint.kind == JointKind::kPrismatic) &&
      !joint.limits) {
    throw KinematicsError(KinematicsErrc::kMissingLimit,
                          "line " + std::to_string(element.line) + ": " + context +
                              " requires a <limit> element");
  }
  return joint;
}

}  // namespace

UrdfModel parse_urdf(std::string_view xml) {
  const XmlElement root = parse_xml(xml);
  if (root.name != "robot") {
    malformed(root, "root element must be <robot>, found <" + root.name + ">");
  }
  std::vector<std::string> warnings;
  std::vector<std::string> links;
  std::vector<JointSpec> joints;
  for (const XmlElement& element : root.children) {
    if (element.name == "link") {
      links.push_back(required_attribute(element, "name"));
      for (const XmlElement& child : element.children) {
        warn(warnings, child, "link '" + links.back() + "'");
      }
    } else if (element.name == "joint") {
      joints.push_back(parse_joint(element, warnings));
    } else {
      warn(warnings, element, "robot");
    }
  }
  const std::string* name = root.attribute("name");
  return UrdfModel{KinematicTree::build(name ? *name : std::string(), std::move(links),
                                        std::move(joints)),
                   std::move(warnings)};
}

UrdfModel load_urdf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open URDF file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_urdf(buffer.str());
}

}  // namespace sociobot::kin
