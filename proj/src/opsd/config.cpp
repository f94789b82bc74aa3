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

#include "sociobot/opsd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <variant>

#include "sociobot/behaviors/recognition.hpp"
#include "sociobot/kinematics/urdf.hpp"
#include "sociobot/sim/scene.hpp"

namespace sociobot::opsd {

ConfigError::ConfigError(std::string file, int line, std::string field, const std::string& message)
    : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : "") +
                         (field.empty() ? "" : ": " + field) + ": " + message),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

namespace {

using Value = std::variant<std::string, double, bool>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

class Parser {
 public:
  Parser(std::string file, const std::filesystem::path& base) : file_(std::move(file)), base_(base) {
    register_keys();
  }

  Config run(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const std::string s = trim(strip_comment(raw));
      if (s.empty()) {
        continue;
      }
      if (s.front() == '[') {
        if (s.back() != ']' || s.size() < 3) {
          throw ConfigError(file_, line, "", "malformed section header");
        }
        section = trim(std::string_view(s).substr(1, s.size() - 2));
        const bool known = std::any_of(setters_.begin(), setters_.end(), [&](const auto& kv) {
          return kv.first.starts_with(section + ".");
        });
        if (!known) {
          throw ConfigError(file_, line, section, "unknown section");
        }
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(file_, line, "", "expected key = value");
      }
      const std::string key = trim(std::string_view(s).substr(0, eq));
      const std::string field = section.empty() ? key : section + "." + key;
      if (key.empty()) {
        throw ConfigError(file_, line, "", "missing key");
      }
      const auto setter = setters_.find(field);
      if (setter == setters_.end()) {
        throw ConfigError(file_, line, field, "unknown key");
      }
      if (!seen_.emplace(field, line).second) {
        throw ConfigError(file_, line, field, "duplicate key");
      }
      const Value value = parse_value(trim(std::string_view(s).substr(eq + 1)), line, field);
      setter->second(value, line, field);
    }
    if (config_.model.empty()) {
      throw ConfigError(file_, 0, "paths.model", "required key is missing");
    }
    if (const char* env = std::getenv("SOCIOBOT_SEED")) {
      const std::string_view text_seed(env);
      std::uint64_t seed = 0;
      const auto [end, ec] = std::from_chars(text_seed.data(), text_seed.data() + text_seed.size(), seed);
      if (ec != std::errc() || end != text_seed.data() + text_seed.size()) {
        throw ConfigError("environment", 0, "SOCIOBOT_SEED", "not an unsigned integer");
      }
      config_.world.seed = seed;
    }
    return config_;
  }

 private:
  using Setter = std::function<void(const Value&, int, const std::string&)>;

  static std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) {
        quoted = !quoted;
      } else if (line[i] == '#' && !quoted) {
        return line.substr(0, i);
      }
    }
    return line;
  }

  Value parse_value(const std::string& s, int line, const std::string& field) const {
    if (s.empty()) {
      throw ConfigError(file_, line, field, "missing value");
    }
    if (s.front() == '"') {
      std::string out;
      std::size_t i = 1;
      for (; i < s.size() && s[i] != '"'; ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
          const char c = s[++i];
          out += c == 'n' ? '\n' : c == 't' ? '\t' : c;
        } else {
          out += s[i];
        }
      }
      if (i != s.size() - 1) {
        throw ConfigError(file_, line, field, "unterminated or trailing text after string");
      }
      return out;
    }
    if (s == "true" || s == "false") {
      return s == "true";
    }
    double d = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(d)) {
      throw ConfigError(file_, line, field, "cannot parse value '" + s + "'");
    }
    return d;
  }

  const std::string& as_string(const Value& v, int line, const std::string& field) const {
    if (const auto* s = std::get_if<std::string>(&v)) {
      return *s;
    }
    throw ConfigError(file_, line, field, "expected a quoted string");
  }

  double as_number(const Value& v, int line, const std::string& field, double lo, double hi) const {
    const auto* d = std::get_if<double>(&v);
    if (d == nullptr) {
      throw ConfigError(file_, line, field, "expected a number");
    }
    if (*d < lo || *d > hi) {
      std::ostringstream msg;
      msg << "value " << *d << " outside [" << lo << ", " << hi << "]";
      throw ConfigError(file_, line, field, msg.str());
    }
    return *d;
  }

  double as_integer(const Value& v, int line, const std::string& field, double lo, double hi) const {
    const double d = as_number(v, line, field, lo, hi);
    if (d != std::floor(d)) {
      throw ConfigError(file_, line, field, "expected an integer");
    }
    return d;
  }

  void path(const std::string& field, std::filesystem::path Config::*member) {
    setters_[field] = [this, member](const Value& v, int line, const std::string& f) {
      const std::filesystem::path p(as_string(v, line, f));
      config_.*member = p.is_absolute() ? p : (base_ / p).lexically_normal();
    };
  }

  void number(const std::string& field, double& target, double lo, double hi) {
    setters_[field] = [this, &target, lo, hi](const Value& v, int line, const std::string& f) {
      target = as_number(v, line, f, lo, hi);
    };
  }

  template <typename Int>
  void integer(const std::string& field, Int& target, double lo, double hi) {
    setters_[field] = [this, &target, lo, hi](const Value& v, int line, const std::string& f) {
      target = static_cast<Int>(as_integer(v, line, f, lo, hi));
    };
  }

  void register_keys() {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    Config& c = config_;
    path("paths.model", &Config::model);
    path("paths.scene", &Config::scene);
    path("paths.gallery", &Config::gallery);
    path("paths.clip_dir", &Config::clip_dir);
    path("paths.console_dir", &Config::console_dir);

    setters_["bus.bind"] = [this](const Value& v, int line, const std::string& f) {
      config_.bind = as_string(v, line, f);
    };
    integer("bus.tcp_port", c.tcp_port, 0, 65535);
    integer("gateway.port", c.ws_port, 0, 65535);

    number("sim.dt", c.world.dt, 1e-5, 1.0);
    setters_["sim.seed"] = [this](const Value& v, int line, const std::string& f) {
      config_.world.seed = static_cast<std::uint64_t>(as_integer(v, line, f, 0, 9007199254740992.0));
    };
    number("sim.grasp_radius", c.world.grasp_radius, 0.0, 10.0);
    number("sim.face_noise_sigma", c.world.face_noise_sigma, 0.0, 10.0);
    integer("sim.camera_period", c.camera_period, 1, 1e6);
    integer("sim.snapshot_period", c.snapshot_period, 1, 1e9);

    // Rule 0 is the gripper group, rule 1 the arms; everything else uses
    // the default (neck, eyes, face).
    number("gains.default_kp", c.world.default_gains.kp, 0.0, 1e6);
    number("gains.default_kd", c.world.default_gains.kd, 0.0, 1e6);
    number("gains.gripper_kp", c.world.gain_rules.at(0).gains.kp, 0.0, 1e6);
    number("gains.gripper_kd", c.world.gain_rules.at(0).gains.kd, 0.0, 1e6);
    number("gains.arm_kp", c.world.gain_rules.at(1).gains.kp, 0.0, 1e6);
    number("gains.arm_kd", c.world.gain_rules.at(1).gains.kd, 0.0, 1e6);

    integer("camera.width", c.world.camera.width, 1, 4096);
    integer("camera.height", c.world.camera.height, 1, 4096);
    number("camera.fx", c.world.camera.fx, 1e-9, kInf);
    number("camera.fy", c.world.camera.fy, 1e-9, kInf);
    number("camera.cx", c.world.camera.cx, 0.0, kInf);
    number("camera.cy", c.world.camera.cy, 0.0, kInf);
    number("camera.near", c.world.camera.near, 1e-6, kInf);
    setters_["camera.mount_link"] = [this](const Value& v, int line, const std::string& f) {
      config_.world.camera.mount_link = as_string(v, line, f);
    };

    number("tracking.k", c.tracking.k, 0.0, 10.0);
    number("tracking.eye_share", c.tracking.eye_share, 0.0, 1.0);
    integer("vision.tolerance", c.vision.tolerance, 0, 255);
    integer("vision.min_area", c.vision.min_area, 1, 1e9);
    number("recognition.threshold", c.recognition_threshold, -1.0, 1.0);
    number("expression.duration", c.expression_duration, 1e-6, 1e6);
    number("pick.approach_height", c.pick.approach_height, 0.0, 2.0);
    number("pick.lift_height", c.pick.lift_height, 0.0, 2.0);
    number("pick.move_time", c.pick.move_time, 1e-3, 1e3);
    number("pick.hold_time", c.pick.hold_time, 1e-3, 1e3);
  }

  std::string file_;
  std::filesystem::path base_;
  Config config_;
  std::map<std::string, Setter> setters_;
  std::map<std::string, int> seen_;
};

}  // namespace

Config parse_config(std::string_view text, const std::filesystem::path& base_dir,
                    const std::string& file_name) {
  Config config = Parser(file_name, base_dir).run(text);
  try {
    config.world.camera.validate();
  } catch (const std::exception& e) {
    throw ConfigError(file_name, 0, "camera", e.what());
  }
  return config;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path.string(), 0, "", "cannot open config file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.parent_path(), path.string());
}

void check_config(const Config& config) {
  const auto fail = [](const std::string& field, const std::filesystem::path& p,
                       const std::string& what) {
    throw ConfigError(p.string(), 0, field, what);
  };
  try {
    kin::load_urdf(config.model);
  } catch (const std::exception& e) {
    fail("paths.model", config.model, e.what());
  }
  if (!config.scene.empty()) {
    try {
      sim::load_scene(config.scene);
    } catch (const std::exception& e) {
      fail("paths.scene", config.scene, e.what());
    }
  }
  if (!config.gallery.empty()) {
    try {
      behaviors::load_gallery(config.gallery);
    } catch (const std::exception& e) {
      fail("paths.gallery", config.gallery, e.what());
    }
  }
  if (!config.clip_dir.empty() && !std::filesystem::is_directory(config.clip_dir)) {
    fail("paths.clip_dir", config.clip_dir, "not a directory");
  }
}

}  // namespace sociobot::opsd
