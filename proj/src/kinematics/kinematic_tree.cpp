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

#include "sociobot/kinematics/kinematic_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sociobot::kin {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

[[noreturn]] void fail(KinematicsErrc code, const std::string& what) {
  throw KinematicsError(code, what);
}

}  // namespace

std::string_view to_string(KinematicsErrc code) {
  switch (code) {
    case KinematicsErrc::kMalformedXml: return "MalformedXml";
    case KinematicsErrc::kDuplicateName: return "DuplicateName";
    case KinematicsErrc::kCycleDetected: return "CycleDetected";
    case KinematicsErrc::kMultipleRoots: return "MultipleRoots";
    case KinematicsErrc::kMissingLimit: return "MissingLimit";
    case KinematicsErrc::kUnknownJointKind: return "UnknownJointKind";
    case KinematicsErrc::kUnknownLink: return "UnknownLink";
    case KinematicsErrc::kUnknownJoint: return "UnknownJoint";
    case KinematicsErrc::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view to_string(JointKind kind) {
  switch (kind) {
    case JointKind::kRevolute: return "revolute";
    case JointKind::kContinuous: return "continuous";
    case JointKind::kPrismatic: return "prismatic";
    case JointKind::kFixed: return "fixed";
  }
  return "unknown";
}

double JointSpec::clamp(double position) const {
  if (!position_limited()) {
    return position;
  }
  return std::clamp(position, *limits->lower, *limits->upper);
}

KinematicTree KinematicTree::build(std::string robot_name, std::vector<std::string> links,
                                   std::vector<JointSpec> joints) {
  KinematicTree tree;
  tree.robot_name_ = std::move(robot_name);
  tree.links_ = std::move(links);
  tree.joints_ = std::move(joints);

  if (tree.links_.empty()) {
    fail(KinematicsErrc::kMalformedXml, "robot has no links");
  }
  for (std::size_t i = 0; i < tree.links_.size(); ++i) {
    if (tree.links_[i].empty()) {
      fail(KinematicsErrc::kMalformedXml, "link with empty name");
    }
    if (!tree.link_index_.emplace(tree.links_[i], i).second) {
      fail(KinematicsErrc::kDuplicateName, "duplicate link name '" + tree.links_[i] + "'");
    }
  }

  tree.parent_joint_.assign(tree.links_.size(), std::nullopt);
  std::vector<std::vector<std::size_t>> child_joints(tree.links_.size());
  for (std::size_t j = 0; j < tree.joints_.size(); ++j) {
    JointSpec& joint = tree.joints_[j];
    if (joint.name.empty()) {
      fail(KinematicsErrc::kMalformedXml, "joint with empty name");
    }
    if (!tree.joint_index_.emplace(joint.name, j).second) {
      fail(KinematicsErrc::kDuplicateName, "duplicate joint name '" + joint.name + "'");
    }
    const auto parent = tree.link_index_.find(joint.parent_link);
    const auto child = tree.link_index_.find(joint.child_link);
    if (parent == tree.link_index_.end() || child == tree.link_index_.end()) {
      fail(KinematicsErrc::kMalformedXml,
           "joint '" + joint.name + "' references an undeclared link");
    }
    if (parent->second == child->second) {
      fail(KinematicsErrc::kCycleDetected, "joint '" + joint.name + "' connects a link to itself");
    }
    if (tree.parent_joint_[child->second]) {
      fail(KinematicsErrc::kCycleDetected,
           "link '" + joint.child_link + "' is the child of more than one joint");
    }
    tree.parent_joint_[child->second] = j;
    child_joints[parent->second].push_back(j);

    if (!joint.origin.position.allFinite() || !joint.origin.orientation.coeffs().allFinite()) {
      fail(KinematicsErrc::kMalformedXml, "joint '" + joint.name + "' has a non-finite origin");
    }
    if (joint.movable()) {
      const double norm = joint.axis.norm();
      if (!std::isfinite(norm) || norm < 1e-12) {
        fail(KinematicsErrc::kMalformedXml, "joint '" + joint.name + "' has a zero axis");
      }
      joint.axis /= norm;
      if (!joint.limits) {
        if (joint.kind == JointKind::kContinuous) {
          joint.limits = JointLimits{std::nullopt, std::nullopt,
                                     std::numeric_limits<double>::infinity(),
                                     std::numeric_limits<double>::infinity()};
        } else {
          fail(KinematicsErrc::kMissingLimit, "joint '" + joint.name + "' has no limit");
        }
      }
      if (joint.kind == JointKind::kContinuous) {
        joint.limits->lower.reset();
        joint.limits->upper.reset();
      } else if (!joint.limits->lower || !joint.limits->upper) {
        fail(KinematicsErrc::kMissingLimit, "joint '" + joint.name + "' lacks lower/upper");
      } else if (*joint.limits->lower > *joint.limits->upper) {
        fail(KinematicsErrc::kMalformedXml, "joint '" + joint.name + "' has lower > upper");
      }
    } else {
      joint.limits.reset();
    }
  }

  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < tree.links_.size(); ++i) {
    if (!tree.parent_joint_[i]) {
      roots.push_back(i);
    }
  }
  if (roots.empty()) {
    fail(KinematicsErrc::kCycleDetected, "every link is some joint's child");
  }
  if (roots.size() > 1) {
    fail(KinematicsErrc::kMultipleRoots,
         "links '" + tree.links_[roots[0]] + "' and '" + tree.links_[roots[1]] +
             "' both have no parent joint");
  }
  tree.root_link_ = tree.links_[roots.front()];

  // Depth-first from the root; anything unreachable sits on a cycle since
  // every non-root link has exactly one parent.
  tree.chains_.assign(tree.links_.size(), {});
  std::vector<bool> seen(tree.links_.size(), false);
  std::vector<std::size_t> stack{roots.front()};
  seen[roots.front()] = true;
  while (!stack.empty()) {
    const std::size_t link = stack.back();
    stack.pop_back();
    for (std::size_t j : child_joints[link]) {
      const std::size_t child = tree.link_index_.at(tree.joints_[j].child_link);
      if (seen[child]) {
        fail(KinematicsErrc::kCycleDetected, "cycle through link '" + tree.links_[child] + "'");
      }
      seen[child] = true;
      tree.chains_[child] = tree.chains_[link];
      tree.chains_[child].push_back(j);
      stack.push_back(child);
    }
  }
  for (std::size_t i = 0; i < tree.links_.size(); ++i) {
    if (!seen[i]) {
      fail(KinematicsErrc::kCycleDetected, "link '" + tree.links_[i] + "' lies on a cycle");
    }
  }

  auto names = std::make_shared<std::vector<std::string>>();
  tree.movable_of_joint_.assign(tree.joints_.size(), kNone);
  for (std::size_t j = 0; j < tree.joints_.size(); ++j) {
    if (tree.joints_[j].movable()) {
      tree.movable_of_joint_[j] = tree.movable_.size();
      tree.movable_.push_back(j);
      names->push_back(tree.joints_[j].name);
    }
  }
  tree.movable_names_ = std::move(names);
  return tree;
}

bool KinematicTree::has_link(std::string_view link) const {
  return link_index_.find(link) != link_index_.end();
}

std::size_t KinematicTree::link_index(std::string_view link) const {
  const auto it = link_index_.find(link);
  if (it == link_index_.end()) {
    fail(KinematicsErrc::kUnknownLink, "unknown link '" + std::string(link) + "'");
  }
  return it->second;
}

std::optional<std::size_t> KinematicTree::movable_index(std::string_view joint) const {
  const auto it = joint_index_.find(joint);
  if (it == joint_index_.end()) {
    return std::nullopt;
  }
  return movable_slot(it->second);
}

std::optional<std::size_t> KinematicTree::movable_slot(std::size_t joint_index) const {
  const std::size_t slot = movable_of_joint_.at(joint_index);
  if (slot == kNone) {
    return std::nullopt;
  }
  return slot;
}

const JointSpec& KinematicTree::joint(std::string_view name) const {
  const auto it = joint_index_.find(name);
  if (it == joint_index_.end()) {
    fail(KinematicsErrc::kUnknownJoint, "unknown joint '" + std::string(name) + "'");
  }
  return joints_[it->second];
}

std::span<const std::size_t> KinematicTree::chain_to(std::string_view link) const {
  return chains_[link_index(link)];
}

std::vector<std::size_t> KinematicTree::movable_chain_to(std::string_view link) const {
  std::vector<std::size_t> out;
  for (std::size_t j : chain_to(link)) {
    if (const auto slot = movable_slot(j)) {
      out.push_back(*slot);
    }
  }
  return out;
}

}  // namespace sociobot::kin
