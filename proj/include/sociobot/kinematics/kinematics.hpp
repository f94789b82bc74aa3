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

#ifndef SOCIOBOT_KINEMATICS_KINEMATICS_HPP_
#define SOCIOBOT_KINEMATICS_KINEMATICS_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sociobot/kinematics/joint_vector.hpp"
#include "sociobot/kinematics/kinematic_tree.hpp"
#include "sociobot/kinematics/pose.hpp"

namespace sociobot::kin {

// Local transform contributed by one joint at position `q`: the static
// origin followed by the joint motion (rotation about the axis for
// revolute/continuous, translation along it for prismatic).
Pose joint_transform(const JointSpec& joint, double q);

// Pose of `link` in the root frame. Throws KinematicsError(kUnknownLink).
Pose forward_kinematics(const KinematicTree& tree, const JointVector& q, std::string_view link);

// Root-frame pose of every link, indexed like tree.links().
std::vector<Pose> link_poses(const KinematicTree& tree, const JointVector& q);

// 6 x num_movable geometric Jacobian of `link`'s origin: rows 0-2 linear
// velocity, rows 3-5 angular velocity, both in the root frame. Joints off
// the root-to-link chain have zero columns.
Eigen::MatrixXd jacobian(const KinematicTree& tree, const JointVector& q, std::string_view link);

struct IkOptions {
  double damping = 0.1;          // lambda in (J J^T + lambda^2 I)
  int max_iterations = 100;
  double step_scale = 1.0;
  double position_tolerance = 1e-3;     // m
  double orientation_tolerance = 1e-2;  // rad
  // Scales the orientation rows of the error and Jacobian. Zero gives a
  // position-only solve, which also drops orientation from convergence.
  double orientation_weight = 1.0;
  // When a run from q0 does not converge, rerun from this many seeded
  // random chain configurations and keep the best result. Zero keeps the
  // solve local to q0 (teleoperation wants that continuity).
  int restarts = 8;
  std::uint64_t restart_seed = 0x5eed;
};

struct IkResult {
  JointVector q;
  bool converged = false;
  int iterations = 0;  // correction steps applied
  double position_error = 0.0;
  double orientation_error = 0.0;
};

// Damped least squares: dq = J^T (J J^T + lambda^2 I)^-1 e over the joints
// on the root-to-`chain_tip` chain, clamped to joint limits after each step.
// Returns the best iterate found; `converged` is false when every attempt
// ran out of iterations. Throws kUnknownLink, or kInvalidArgument for a
// non-finite target.
IkResult ik_solve(const KinematicTree& tree, const JointVector& q0, std::string_view chain_tip,
                  const Pose& target, const IkOptions& options = {});

}  // namespace sociobot::kin

#endif  // SOCIOBOT_KINEMATICS_KINEMATICS_HPP_
