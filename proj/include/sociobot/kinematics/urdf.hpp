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

#ifndef SOCIOBOT_KINEMATICS_URDF_HPP_
#define SOCIOBOT_KINEMATICS_URDF_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sociobot/kinematics/kinematic_tree.hpp"

namespace sociobot::kin {

struct UrdfModel {
  KinematicTree tree;
  // One entry per ignored element or attribute, with its line number.
  std::vector<std::string> warnings;
};

// Parses the kinematic subset of URDF: <robot>, <link name>, and <joint>
// with <origin xyz rpy>, <axis xyz>, <limit>, <parent>, <child>. Anything
// else (visual, collision, inertial, transmission, ...) is skipped with a
// warning. Every failure surfaces as a KinematicsError.
UrdfModel parse_urdf(std::string_view xml);
UrdfModel load_urdf(const std::filesystem::path& path);

}  // namespace sociobot::kin

#endif  // SOCIOBOT_KINEMATICS_URDF_HPP_
