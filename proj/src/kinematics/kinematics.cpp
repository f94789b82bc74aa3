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

#include "sociobot/kinematics/kinematics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>

namespace sociobot::kin {
namespace {

double position_of(const KinematicTree& tree, const JointVector& q, std::size_t joint_index) {
  const auto slot = tree.movable_slot(joint_index);
  return slot ? q[*slot] : 0.0;
}

void check_layout(const KinematicTree& tree, const JointVector& q) {
  if (q.size() != tree.num_movable()) {
    throw KinematicsError(KinematicsErrc::kInvalidArgument,
                          "joint vector has " + std::to_string(q.size()) + " entries, tree has " +
                              std::to_string(tree.num_movable()) + " movable joints");
  }
}

// Chain frames for the Jacobian: for every joint on the chain, the root-frame
// pose of the joint frame (parent link pose composed with the static origin).
struct ChainFrames {
  std::vector<Pose> joint_frames;
  Pose tip;
};

ChainFrames chain_frames(const KinematicTree& tree, const JointVector& q, std::string_view link) {
  const auto chain = tree.chain_to(link);
  ChainFrames out;
  out.joint_frames.reserve(chain.size());
  Pose pose;
  for (std::size_t j : chain) {
    const JointSpec& joint = tree.joints()[j];
    out.joint_frames.push_back(pose * joint.origin);
    pose = pose * joint_transform(joint, position_of(tree, q, j));
  }
  out.tip = pose;
  return out;
}

}  // namespace

Pose joint_transform(const JointSpec& joint, double q) {
  switch (joint.kind) {
    case JointKind::kRevolute:
    case JointKind::kContinuous: {
      UnitQuat motion(Eigen::AngleAxisd(q, joint.axis));
      return joint.origin * Pose{Vec3::Zero(), motion};
    }
    case JointKind::kPrismatic:
      return joint.origin * Pose::translation(q * joint.axis);
    case JointKind::kFixed:
      break;
  }
  return joint.origin;
}

Pose forward_kinematics(const KinematicTree& tree, const JointVector& q, std::string_view link) {
  check_layout(tree, q);
  Pose pose;
  for (std::size_t j : tree.chain_to(link)) {
    pose = pose * joint_transform(tree.joints()[j], position_of(tree, q, j));
  }
  return pose;
}

std::vector<Pose> link_poses(const KinematicTree& tree, const JointVector& q) {
  check_layout(tree, q);
  std::vector<Pose> poses(tree.links().size());
  std::vector<bool> done(poses.size(), false);
  const std::size_t root = tree.link_index(tree.root_link());
  done[root] = true;
  // Joints are not guaranteed to be in topological order, so walk each
  // link's chain from the deepest already-known ancestor.
  for (std::size_t link = 0; link < poses.size(); ++link) {
    if (done[link]) {
      continue;
    }
    const auto chain = tree.chain_to(tree.links()[link]);
    std::size_t start = 0;
    Pose pose;
    for (std::size_t k = chain.size(); k-- > 0;) {
      const std::size_t parent = tree.link_index(tree.joints()[chain[k]].parent_link);
      if (done[parent]) {
        start = k;
        pose = poses[parent];
        break;
      }
    }
    for (std::size_t k = start; k < chain.size(); ++k) {
      const JointSpec& joint = tree.joints()[chain[k]];
      pose = pose * joint_transform(joint, position_of(tree, q, chain[k]));
      const std::size_t child = tree.link_index(joint.child_link);
      poses[child] = pose;
      done[child] = true;
    }
  }
  return poses;
}

Eigen::MatrixXd jacobian(const KinematicTree& tree, const JointVector& q, std::string_view link) {
  check_layout(tree, q);
  const ChainFrames frames = chain_frames(tree, q, link);
  const auto chain = tree.chain_to(link);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, static_cast<Eigen::Index>(tree.num_movable()));
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const auto slot = tree.movable_slot(chain[k]);
    if (!slot) {
      continue;
    }
    const JointSpec& joint = tree.joints()[chain[k]];
    const Pose& frame = frames.joint_frames[k];
    const Vec3 axis = frame.orientation * joint.axis;
    const auto col = static_cast<Eigen::Index>(*slot);
    if (joint.kind == JointKind::kPrismatic) {
      jac.block<3, 1>(0, col) = axis;
    } else {
      jac.block<3, 1>(0, col) = axis.cross(frames.tip.position - frame.position);
      jac.block<3, 1>(3, col) = axis;
    }
  }
  return jac;
}

namespace {

// One damped-least-squares descent from q. `iterations` in the result counts
// the correction steps taken to reach the returned iterate.
IkResult descend(const KinematicTree& tree, JointVector q, std::string_view chain_tip,
                 const std::vector<std::size_t>& chain, const Pose& target,
                 const IkOptions& options) {
  const double weight = options.orientation_weight;
  const UnitQuat target_orientation = target.orientation.normalized();
  IkResult best;
  double best_score = std::numeric_limits<double>::infinity();
  const auto m = static_cast<Eigen::Index>(chain.size());
  for (int iteration = 0;; ++iteration) {
    const ChainFrames frames = chain_frames(tree, q, chain_tip);
    const Vec3 position_error = target.position - frames.tip.position;
    const Vec3 rotation_error = orientation_error(target_orientation, frames.tip.orientation);
    const double perr = position_error.norm();
    const double oerr = rotation_error.norm();
    const bool converged = perr < options.position_tolerance &&
                           (weight == 0.0 || oerr < options.orientation_tolerance);
    const double score = converged ? -1.0 : perr + weight * oerr;
    if (score < best_score) {
      best_score = score;
      best = IkResult{q, converged, iteration, perr, oerr};
    }
    if (converged || iteration >= options.max_iterations || m == 0) {
      break;
    }

    const Eigen::MatrixXd full = jacobian(tree, q, chain_tip);
    Eigen::MatrixXd jac(6, m);
    for (Eigen::Index c = 0; c < m; ++c) {
      jac.col(c) = full.col(static_cast<Eigen::Index>(chain[static_cast<std::size_t>(c)]));
    }
    jac.bottomRows<3>() *= weight;
    Eigen::Matrix<double, 6, 1> error;
    error << position_error, weight * rotation_error;

    const Eigen::Matrix<double, 6, 6> damped =
        jac * jac.transpose() +
        options.damping * options.damping * Eigen::Matrix<double, 6, 6>::Identity();
    const Eigen::VectorXd dq = jac.transpose() * damped.ldlt().solve(error);
    for (Eigen::Index c = 0; c < m; ++c) {
      const std::size_t slot = chain[static_cast<std::size_t>(c)];
      q[slot] = tree.movable_joint(slot).clamp(q[slot] + options.step_scale * dq[c]);
    }
  }
  return best;
}

double score_of(const IkResult& r, double weight) {
  return r.converged ? -1.0 : r.position_error + weight * r.orientation_error;
}

}  // namespace

IkResult ik_solve(const KinematicTree& tree, const JointVector& q0, std::string_view chain_tip,
                  const Pose& target, const IkOptions& options) {
  check_layout(tree, q0);
  if (!target.position.allFinite() || !target.orientation.coeffs().allFinite() ||
      target.orientation.norm() == 0.0) {
    throw KinematicsError(KinematicsErrc::kInvalidArgument, "IK target must be finite");
  }
  const std::vector<std::size_t> chain = tree.movable_chain_to(chain_tip);

  JointVector start = q0;
  clamp_to_limits(tree, start);
  IkResult best = descend(tree, start, chain_tip, chain, target, options);

  std::mt19937_64 rng(options.restart_seed);
  for (int attempt = 0; attempt < options.restarts && !best.converged; ++attempt) {
    JointVector seed = start;
    for (std::size_t slot : chain) {
      const JointSpec& joint = tree.movable_joint(slot);
      double lo = -std::numbers::pi;
      double hi = std::numbers::pi;
      if (joint.position_limited()) {
        lo = *joint.limits->lower;
        hi = *joint.limits->upper;
      }
      // Top 53 bits -> [0, 1); avoids library-specific distributions.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      seed[slot] = lo + u * (hi - lo);
    }
    IkResult candidate = descend(tree, seed, chain_tip, chain, target, options);
    if (score_of(candidate, options.orientation_weight) <
        score_of(best, options.orientation_weight)) {
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace sociobot::kin
