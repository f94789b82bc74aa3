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

// Test-only reference kinematics. Reads the URDF with Boost.PropertyTree
// (not the library's expat parser) and multiplies 4x4 homogeneous matrices
// built from explicit sin/cos formulas, so it shares no code path with
// sociobot::kin.

#ifndef SOCIOBOT_TESTS_ORACLES_CHAIN_ORACLE_HPP_
#define SOCIOBOT_TESTS_ORACLES_CHAIN_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace sociobot::testing {

inline Eigen::Vector3d oracle_triple(const std::string& text) {
  std::istringstream in(text);
  Eigen::Vector3d v;
  in >> v.x() >> v.y() >> v.z();
  return v;
}

inline Eigen::Matrix3d oracle_rot_x(double a) {
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}
inline Eigen::Matrix3d oracle_rot_y(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}
inline Eigen::Matrix3d oracle_rot_z(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

// Rodrigues: R = I + sin(a) K + (1 - cos(a)) K^2 for unit axis k.
inline Eigen::Matrix3d oracle_axis_angle(const Eigen::Vector3d& axis, double a) {
  const Eigen::Vector3d k = axis / std::sqrt(axis.dot(axis));
  Eigen::Matrix3d kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Eigen::Matrix3d::Identity() + std::sin(a) * kx + (1.0 - std::cos(a)) * kx * kx;
}

inline Eigen::Matrix4d oracle_homogeneous(const Eigen::Matrix3d& r, const Eigen::Vector3d& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 3>(0, 0) = r;
  m.block<3, 1>(0, 3) = t;
  return m;
}

class ChainOracle {
 public:
  struct Joint {
    std::string name;
    std::string type;
    std::string parent;
    std::string child;
    Eigen::Matrix4d origin = Eigen::Matrix4d::Identity();
    Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
  };

  static ChainOracle from_text(const std::string& urdf) {
    namespace pt = boost::property_tree;
    std::istringstream in(urdf);
    pt::ptree doc;
    pt::read_xml(in, doc);
    ChainOracle oracle;
    for (const auto& [tag, node] : doc.get_child("robot")) {
      if (tag != "joint") {
        continue;
      }
      Joint j;
      j.name = node.get<std::string>("<xmlattr>.name");
      j.type = node.get<std::string>("<xmlattr>.type");
      j.parent = node.get<std::string>("parent.<xmlattr>.link");
      j.child = node.get<std::string>("child.<xmlattr>.link");
      const Eigen::Vector3d xyz = oracle_triple(node.get<std::string>("origin.<xmlattr>.xyz", "0 0 0"));
      const Eigen::Vector3d rpy = oracle_triple(node.get<std::string>("origin.<xmlattr>.rpy", "0 0 0"));
      j.origin = oracle_homogeneous(
          oracle_rot_z(rpy.z()) * oracle_rot_y(rpy.y()) * oracle_rot_x(rpy.x()), xyz);
      j.axis = oracle_triple(node.get<std::string>("axis.<xmlattr>.xyz", "1 0 0"));
      oracle.parent_joint_[j.child] = oracle.joints_.size();
      oracle.joints_.push_back(j);
    }
    return oracle;
  }

  // Root-frame homogeneous transform of `link`; joints missing from `q` sit at zero.
  Eigen::Matrix4d link_transform(const std::string& link,
                                 const std::map<std::string, double>& q) const {
    std::vector<const Joint*> chain;
    std::string current = link;
    for (auto it = parent_joint_.find(current); it != parent_joint_.end();
         it = parent_joint_.find(current)) {
      chain.push_back(&joints_[it->second]);
      current = joints_[it->second].parent;
      if (chain.size() > joints_.size()) {
        throw std::runtime_error("oracle: cycle");
      }
    }
    Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const Joint& j = **it;
      const auto qit = q.find(j.name);
      const double value = qit == q.end() ? 0.0 : qit->second;
      Eigen::Matrix4d motion = Eigen::Matrix4d::Identity();
      if (j.type == "revolute" || j.type == "continuous") {
        motion.block<3, 3>(0, 0) = oracle_axis_angle(j.axis, value);
      } else if (j.type == "prismatic") {
        motion.block<3, 1>(0, 3) = value * j.axis / std::sqrt(j.axis.dot(j.axis));
      }
      t = t * j.origin * motion;
    }
    return t;
  }

  const std::vector<Joint>& joints() const { return joints_; }

 private:
  std::vector<Joint> joints_;
  std::map<std::string, std::size_t> parent_joint_;
};

// Rotation vector of a rotation matrix (log map), for angular finite differences.
inline Eigen::Vector3d oracle_rotation_log(const Eigen::Matrix3d& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::acos(c);
  const Eigen::Vector3d w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (angle < 1e-12) {
    return 0.5 * w;
  }
  return w * (angle / (2.0 * std::sin(angle)));
}

}  // namespace sociobot::testing

#endif  // SOCIOBOT_TESTS_ORACLES_CHAIN_ORACLE_HPP_
