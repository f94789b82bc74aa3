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

#include "sociobot/opsd/runtime.hpp"

#include <algorithm>
#include <ostream>

#include "sociobot/behaviors/recognition.hpp"
#include "sociobot/kinematics/urdf.hpp"
#include "sociobot/sim/scene.hpp"

namespace sociobot::opsd {

using nlohmann::json;

std::map<std::string, behaviors::MotionClip> load_clip_library(const std::filesystem::path& dir,
                                                               const kin::KinematicTree& tree) {
  std::map<std::string, behaviors::MotionClip> library;
  if (dir.empty()) {
    return library;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    behaviors::MotionClip clip = behaviors::load_clip(file);
    behaviors::validate_clip(clip, tree);
    if (library.count(clip.name) != 0) {
      throw behaviors::BehaviorError(behaviors::BehaviorErrc::kBadClip,
                                     file.string() + ": duplicate clip name '" + clip.name + "'");
    }
    library.emplace(clip.name, std::move(clip));
  }
  return library;
}

Runtime::Runtime(Config config) : config_(std::move(config)) {
  kin::KinematicTree tree = kin::load_urdf(config_.model).tree;
  sim::Scene scene = config_.scene.empty() ? sim::Scene{} : sim::load_scene(config_.scene);
  world_ = std::make_unique<sim::World>(std::move(tree), config_.world, std::move(scene));

  broker_.set_clock([this] { return clock_.load(); });
  driver_.store(std::this_thread::get_id());
  broker_.set_intercept([this](const bus::Envelope& env, std::string_view publisher) {
    if (std::this_thread::get_id() == driver_.load()) {
      return false;
    }
    std::lock_guard lock(held_mutex_);
    held_.push_back({env, std::string(publisher)});
    return true;
  });

  sim_node_ = std::make_unique<SimNode>(*world_, broker_, config_.camera_period,
                                        config_.snapshot_period);

  behaviors::NodeEnv env;
  env.broker = &broker_;
  env.tree = &world_->tree();
  env.camera = config_.world.camera;
  env.dt = config_.world.dt;
  env.camera_period = config_.camera_period;
  env.left_tool = config_.world.left_tool;
  env.right_tool = config_.world.right_tool;

  nodes_.push_back(std::make_unique<behaviors::VisionNode>(env, config_.vision));
  if (!config_.gallery.empty()) {
    nodes_.push_back(std::make_unique<behaviors::RecognitionNode>(
        env, behaviors::load_gallery(config_.gallery), config_.recognition_threshold));
  }
  nodes_.push_back(std::make_unique<behaviors::TrackerNode>(env, config_.tracking));
  nodes_.push_back(std::make_unique<behaviors::ExpressionNode>(env, config_.expression_duration));
  nodes_.push_back(std::make_unique<behaviors::ClipNode>(
      env, load_clip_library(config_.clip_dir, world_->tree()), config_.pick));
  behaviors::TeleopNames names;
  names.left_tool = config_.world.left_tool;
  names.right_tool = config_.world.right_tool;
  nodes_.push_back(std::make_unique<behaviors::TeleopNode>(env, names));
  nodes_.push_back(std::make_unique<behaviors::DialogNode>(env));
}

Runtime::~Runtime() {
  broker_.set_intercept({});
  broker_.set_tap({});
}

void Runtime::set_log(std::ostream* out) {
  log_ = out;
  if (out == nullptr) {
    broker_.set_tap({});
    return;
  }
  *out << json{{"sociobot_log", 1}, {"seed", config_.world.seed}, {"dt", config_.world.dt}}.dump()
       << '\n';
  broker_.set_tap([out](const bus::Envelope& env, std::string_view publisher) {
    *out << json{{"publisher", publisher}, {"envelope", bus::to_json(env)}}.dump() << '\n';
  });
}

std::size_t Runtime::held_inputs() const {
  std::lock_guard lock(held_mutex_);
  return held_.size();
}

void Runtime::release_held() {
  std::vector<Held> held;
  {
    std::lock_guard lock(held_mutex_);
    held.swap(held_);
  }
  for (Held& h : held) {
    inject(std::move(h.envelope), h.publisher);
  }
}

bus::Envelope Runtime::inject(bus::Envelope env, std::string_view publisher) {
  env.stamp = time();
  return broker_.publish(std::move(env), publisher);
}

void Runtime::step() {
  driver_.store(std::this_thread::get_id());
  if (!started_) {
    started_ = true;
    sim_node_->publish_initial();
  }
  release_held();
  sim_node_->tick();
  clock_.store(world_->time());
  for (auto& node : nodes_) {
    node->tick(world_->tick());
  }
}

void Runtime::run_until(double t) {
  while (time() < t) {
    step();
  }
}

}  // namespace sociobot::opsd
