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

#ifndef SOCIOBOT_TESTS_ORACLES_TEST_PATHS_HPP_
#define SOCIOBOT_TESTS_ORACLES_TEST_PATHS_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "sociobot/kinematics/joint_vector.hpp"

namespace sociobot::testing {

inline std::filesystem::path source_dir() { return SOCIOBOT_SOURCE_DIR; }
inline std::filesystem::path sample_model_path() { return source_dir() / "models" / "sociobot.urdf"; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// Uniform draw inside the limits of every movable joint (continuous joints
// in [-pi, pi]).
inline kin::JointVector random_configuration(const kin::KinematicTree& tree, std::mt19937_64& rng) {
  kin::JointVector q(tree);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const kin::JointSpec& joint = tree.movable_joint(i);
    double lo = -3.141592653589793;
    double hi = 3.141592653589793;
    if (joint.position_limited()) {
      lo = *joint.limits->lower;
      hi = *joint.limits->upper;
    }
    q[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return q;
}

}  // namespace sociobot::testing

#endif  // SOCIOBOT_TESTS_ORACLES_TEST_PATHS_HPP_
