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

#ifndef SOCIOBOT_KINEMATICS_JOINT_VECTOR_HPP_
#define SOCIOBOT_KINEMATICS_JOINT_VECTOR_HPP_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sociobot/kinematics/kinematic_tree.hpp"

namespace sociobot::kin {

// Positions of the movable joints of one tree, in the tree's movable-joint
// order. Copies share the (immutable) name table.
class JointVector {
 public:
  JointVector() = default;
  explicit JointVector(const KinematicTree& tree);

  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  const std::vector<std::string>& names() const;
  bool same_layout(const JointVector& other) const;

  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

  // Name lookup; throws KinematicsError(kUnknownJoint).
  double at(std::string_view joint) const;
  void set(std::string_view joint, double value);
  bool contains(std::string_view joint) const;

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  bool operator==(const JointVector& rhs) const;

 private:
  std::size_t index_of(std::string_view joint) const;

  std::shared_ptr<const std::vector<std::string>> names_;
  Eigen::VectorXd values_;
};

// Clamps every limited joint into [lower, upper].
void clamp_to_limits(const KinematicTree& tree, JointVector& q);
bool within_limits(const KinematicTree& tree, const JointVector& q, double tolerance = 0.0);

}  // namespace sociobot::kin

#endif  // SOCIOBOT_KINEMATICS_JOINT_VECTOR_HPP_
