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

#include "sociobot/opsd/replay.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "sociobot/behaviors/messages.hpp"

namespace sociobot::opsd {

using nlohmann::json;
namespace topics = behaviors::topics;

namespace {

constexpr std::array<std::string_view, 8> kInternalPublishers = {
    "sim", "vision", "recognition", "tracker", "expression", "clips", "teleop", "dialog"};

// Topics only ever published from outside. /joint/target is not among
// them: behaviors publish it too, so an anonymous record cannot tell.
constexpr std::array<std::string_view, 5> kInputTopics = {
    topics::kSpeechRecognized, topics::kTeleopFrame, topics::kTeleopRecord,
    topics::kExpressionSet, topics::kClipPlay};

std::vector<std::string> joint_states(const std::vector<LogRecord>& records) {
  std::vector<std::string> out;
  for (const LogRecord& r : records) {
    if (r.envelope.topic == topics::kJointState) {
      out.push_back(bus::dump_envelope(r.envelope));
    }
  }
  return out;
}

}  // namespace

BusLog read_log(std::istream& in) {
  BusLog log;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) {
      continue;
    }
    try {
      const json j = json::parse(line);
      if (j.contains("sociobot_log")) {
        if (j.contains("seed")) {
          log.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("dt")) {
          log.dt = j["dt"].get<double>();
        }
      } else if (j.contains("envelope")) {
        log.records.push_back({j.value("publisher", std::string()),
                               bus::envelope_from_json(j["envelope"])});
      } else {
        log.records.push_back({std::string(), bus::envelope_from_json(j)});
      }
    } catch (const std::exception& e) {
      throw ScenarioError("log line " + std::to_string(number) + ": " + e.what());
    }
  }
  return log;
}

BusLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open log " + path.string());
  }
  try {
    return read_log(in);
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

bool is_input(const LogRecord& record) {
  if (!record.publisher.empty()) {
    return std::find(kInternalPublishers.begin(), kInternalPublishers.end(), record.publisher) ==
           kInternalPublishers.end();
  }
  const bus::Envelope& env = record.envelope;
  if (env.topic == topics::kWorldCommand) {
    // Clips publish grasp/release; scene edits come from operators.
    const json& op = env.payload.is_object() ? env.payload.value("op", json()) : json();
    return op.is_string() && op.get<std::string>().starts_with("set_");
  }
  return std::find(kInputTopics.begin(), kInputTopics.end(), env.topic) != kInputTopics.end();
}

Scenario scenario_from_log(const BusLog& log) {
  Scenario s;
  s.name = "replay";
  for (const LogRecord& r : log.records) {
    if (r.envelope.topic == topics::kJointState) {
      s.duration = std::max(s.duration, r.envelope.stamp);
    }
    if (!is_input(r)) {
      continue;
    }
    ScenarioPublish p;
    p.at = r.envelope.stamp;
    p.topic = r.envelope.topic;
    p.type = r.envelope.type;
    p.payload = r.envelope.payload;
    p.publisher = r.publisher.empty() ? std::string("replay") : r.publisher;
    s.publishes.push_back(std::move(p));
  }
  std::stable_sort(s.publishes.begin(), s.publishes.end(),
                   [](const ScenarioPublish& a, const ScenarioPublish& b) { return a.at < b.at; });
  return s;
}

ReplayResult replay_log(const BusLog& log, Config config, std::ostream* out_log) {
  ReplayResult result;
  if (log.seed) {
    config.world.seed = *log.seed;
  }
  if (log.dt && *log.dt != config.world.dt) {
    result.detail = "log dt " + std::to_string(*log.dt) + " differs from config dt " +
                    std::to_string(config.world.dt);
    return result;
  }
  const Scenario scenario = scenario_from_log(log);
  result.inputs = scenario.publishes.size();
  const std::vector<std::string> expected = joint_states(log.records);
  result.expected = expected.size();

  std::stringstream captured;
  RunOptions options;
  options.log = &captured;
  // The seed is already in config; keep a scenario seed from overriding it.
  run_scenario(scenario, config, options);
  if (out_log != nullptr) {
    *out_log << captured.str();
  }
  const std::vector<std::string> produced = joint_states(read_log(captured).records);
  result.produced = produced.size();

  for (std::size_t i = 0; i < std::min(expected.size(), produced.size()); ++i) {
    if (expected[i] != produced[i]) {
      result.detail = "/joint/state #" + std::to_string(i + 1) + " differs:\n  log:    " +
                      expected[i] + "\n  replay: " + produced[i];
      return result;
    }
  }
  if (expected.size() != produced.size()) {
    result.detail = "log has " + std::to_string(expected.size()) + " /joint/state envelopes, replay " +
                    std::to_string(produced.size());
    return result;
  }
  result.identical = true;
  return result;
}

}  // namespace sociobot::opsd
