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

#ifndef SOCIOBOT_KINEMATICS_KINEMATIC_TREE_HPP_
#define SOCIOBOT_KINEMATICS_KINEMATIC_TREE_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sociobot/kinematics/pose.hpp"

namespace sociobot::kin {

enum class KinematicsErrc {
  kMalformedXml,
  kDuplicateName,
  kCycleDetected,
  kMultipleRoots,
  kMissingLimit,
  kUnknownJointKind,
  kUnknownLink,
  kUnknownJoint,
  kInvalidArgument,
};

std::string_view to_string(KinematicsErrc code);

class KinematicsError : public std::runtime_error {
 public:
  KinematicsError(KinematicsErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  KinematicsErrc code() const noexcept { return code_; }

 private:
  KinematicsErrc code_;
};

enum class JointKind { kRevolute, kContinuous, kPrismatic, kFixed };

std::string_view to_string(JointKind kind);

struct JointLimits {
  // Absent for continuous joints.
  std::optional<double> lower;
  std::optional<double> upper;
  double max_velocity = 0.0;
  double max_effort = 0.0;
};

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::kFixed;
  Vec3 axis = Vec3::UnitX();
  Pose origin;
  std::string parent_link;
  std::string child_link;
  std::optional<JointLimits> limits;  // absent for fixed joints

  bool movable() const { return kind != JointKind::kFixed; }
  bool position_limited() const { return limits && limits->lower && limits->upper; }
  // Clamps to [lower, upper] for limited joints; identity otherwise.
  double clamp(double position) const;
};

// Link/joint graph of one robot. Immutable once built, so a single instance
// can be shared freely across threads.
class KinematicTree {
 public:
  // Validates the tree invariants (unique names, single root, acyclic,
  // unit axes, lower <= upper) and precomputes the root-to-link chains.
  static KinematicTree build(std::string robot_name, std::vector<std::string> links,
                             std::vector<JointSpec> joints);

  const std::string& robot_name() const { return robot_name_; }
  const std::string& root_link() const { return root_link_; }
  const std::vector<std::string>& links() const { return links_; }
  const std::vector<JointSpec>& joints() const { return joints_; }

  bool has_link(std::string_view link) const;
  std::size_t link_index(std::string_view link) const;  // throws kUnknownLink

  // Non-fixed joints in document order. JointVector uses this order.
  const std::shared_ptr<const std::vector<std::string>>& movable_joint_names() const {
    return movable_names_;
  }
  std::size_t num_movable() const { return movable_.size(); }
  const JointSpec& movable_joint(std::size_t i) const { return joints_[movable_[i]]; }
  std::optional<std::size_t> movable_index(std::string_view joint) const;
  // Movable index of joints()[joint_index], if that joint is movable.
  std::optional<std::size_t> movable_slot(std::size_t joint_index) const;
  const JointSpec& joint(std::string_view name) const;  // throws kUnknownJoint

  // Joint indices (into joints()) from the root down to `link`, in order.
  std::span<const std::size_t> chain_to(std::string_view link) const;
  // Movable-joint indices along chain_to(link).
  std::vector<std::size_t> movable_chain_to(std::string_view link) const;
  // Index into joints() of the joint whose child is `link`; none for root.
  std::optional<std::size_t> parent_joint(std::size_t link) const { return parent_joint_[link]; }

 private:
  KinematicTree() = default;

  std::string robot_name_;
  std::string root_link_;
  std::vector<std::string> links_;
  std::vector<JointSpec> joints_;
  std::map<std::string, std::size_t, std::less<>> link_index_;
  std::map<std::string, std::size_t, std::less<>> joint_index_;
  std::vector<std::size_t> movable_;
  std::vector<std::size_t> movable_of_joint_;  // joints_ index -> movable index or npos
  std::shared_ptr<const std::vector<std::string>> movable_names_;
  std::vector<std::optional<std::size_t>> parent_joint_;
  std::vector<std::vector<std::size_t>> chains_;
};

}  // namespace sociobot::kin

#endif  // SOCIOBOT_KINEMATICS_KINEMATIC_TREE_HPP_
