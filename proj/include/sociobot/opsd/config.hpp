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

#ifndef SOCIOBOT_OPSD_CONFIG_HPP_
#define SOCIOBOT_OPSD_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sociobot/behaviors/clips.hpp"
#include "sociobot/behaviors/tracking.hpp"
#include "sociobot/behaviors/vision.hpp"
#include "sociobot/sim/world.hpp"

namespace sociobot::opsd {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string file, int line, std::string field, const std::string& message);

  const std::string& file() const { return file_; }
  int line() const { return line_; }  // 0 when not tied to a line
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  int line_;
  std::string field_;
};

struct Config {
  // Paths are resolved against the config file's directory.
  std::filesystem::path model;
  std::filesystem::path scene;
  std::filesystem::path gallery;
  std::filesystem::path clip_dir;
  std::filesystem::path console_dir;

  std::string bind = "127.0.0.1";
  std::uint16_t tcp_port = 8765;
  std::uint16_t ws_port = 8766;

  sim::WorldConfig world;
  int camera_period = 6;      // ticks per camera frame / tracking update
  int snapshot_period = 60;   // ticks per /world/event snapshot
  behaviors::TrackingGains tracking;
  behaviors::SegmentOptions vision;
  double recognition_threshold = 0.80;
  double expression_duration = 0.6;
  behaviors::PickPlaceOptions pick;
};

// Key/value file in a TOML subset: [section] headers, key = value with
// quoted strings, numbers and true/false, '#' comments. Unknown keys and
// bad values raise ConfigError with the line and dotted field name.
// SOCIOBOT_SEED in the environment overrides sim.seed.
Config parse_config(std::string_view text, const std::filesystem::path& base_dir,
                    const std::string& file_name = "<config>");
Config load_config(const std::filesystem::path& path);

// Checks that the referenced files exist and load. Throws ConfigError.
void check_config(const Config& config);

}  // namespace sociobot::opsd

#endif  // SOCIOBOT_OPSD_CONFIG_HPP_
