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

#include "sociobot/kinematics/joint_vector.hpp"

#include <algorithm>

namespace sociobot::kin {
namespace {
const std::vector<std::string> kNoNames;
}

JointVector::JointVector(const KinematicTree& tree)
    : names_(tree.movable_joint_names()),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tree.num_movable()))) {}

const std::vector<std::string>& JointVector::names() const {
  return names_ ? *names_ : kNoNames;
}

bool JointVector::same_layout(const JointVector& other) const {
  return names_ == other.names_ || names() == other.names();
}

std::size_t JointVector::index_of(std::string_view joint) const {
  const auto& n = names();
  const auto it = std::find(n.begin(), n.end(), joint);
  if (it == n.end()) {
    throw KinematicsError(KinematicsErrc::kUnknownJoint,
                          "no movable joint named '" + std::string(joint) + "'");
  }
  return static_cast<std::size_t>(it - n.begin());
}

double JointVector::at(std::string_view joint) const { return (*this)[index_of(joint)]; }

void JointVector::set(std::string_view joint, double value) { (*this)[index_of(joint)] = value; }

bool JointVector::contains(std::string_view joint) const {
  const auto& n = names();
  return std::find(n.begin(), n.end(), joint) != n.end();
}

bool JointVector::operator==(const JointVector& rhs) const {
  return same_layout(rhs) && values_.size() == rhs.values_.size() && values_ == rhs.values_;
}

void clamp_to_limits(const KinematicTree& tree, JointVector& q) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = tree.movable_joint(i).clamp(q[i]);
  }
}

bool within_limits(const KinematicTree& tree, const JointVector& q, double tolerance) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    const JointSpec& joint = tree.movable_joint(i);
    if (!joint.position_limited()) {
      continue;
    }
    if (q[i] < *joint.limits->lower - tolerance || q[i] > *joint.limits->upper + tolerance) {
      return false;
    }
  }
  return true;
}

}  // namespace sociobot::kin
