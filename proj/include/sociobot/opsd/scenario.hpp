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

#ifndef SOCIOBOT_OPSD_SCENARIO_HPP_
#define SOCIOBOT_OPSD_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sociobot/opsd/config.hpp"

namespace sociobot::opsd {

class Runtime;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioPublish {
  double at = 0.0;
  std::string topic;
  std::string type;
  nlohmann::json payload;
  std::string publisher = "scenario";
};

// One check on a payload. `path` is a JSON pointer into the payload ("" is
// the whole payload). Ops: eq, ne, near, lt, le, gt, ge, contains, within,
// exists. near and within use `tolerance`; within compares the first
// len(value) elements of an array by Euclidean distance.
struct Predicate {
  std::string path;
  std::string op = "eq";
  nlohmann::json value;
  double tolerance = 0.0;
};

struct ScenarioAssert {
  enum class Mode { kEventually, kAlways };

  std::string name;
  std::string topic;
  std::vector<Predicate> where;  // all must hold for one envelope
  Mode mode = Mode::kEventually;
  double from = 0.0;
  double deadline = 0.0;
};

struct Scenario {
  std::string name;
  std::optional<std::filesystem::path> config;  // resolved against the file
  std::optional<std::uint64_t> seed;
  double duration = 0.0;  // run at least this long
  std::vector<ScenarioPublish> publishes;
  std::vector<ScenarioAssert> asserts;
};

// A scenario document is either a list of steps or an object
// {name?, config?, seed?, duration?, steps: [...]}. Steps:
//   {"at": t, "publish": topic, "payload": {...}, "type"?: T}
//   {"assert": name, "topic": topic, "where": predicate | [predicates],
//    "deadline": t, "from"?: t, "mode"?: "eventually" | "always"}
// Throws ScenarioError naming the step.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

bool evaluate(const Predicate& predicate, const nlohmann::json& payload);

struct AssertResult {
  std::string name;
  bool passed = false;
  std::optional<double> time;  // stamp of the deciding envelope
  std::size_t seen = 0;        // envelopes on the topic inside the window
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  bool passed = true;
  std::uint64_t ticks = 0;
  double sim_time = 0.0;
  std::vector<AssertResult> asserts;
};

nlohmann::json report_to_json(const ScenarioReport& report);

struct RunOptions {
  std::ostream* log = nullptr;
  // Called after every step, for instrumentation.
  std::function<void(const Runtime&)> on_step;
};

// Runs until every publish is out, every assertion is decided and
// `duration` has elapsed. An empty scenario runs no ticks.
ScenarioReport run_scenario(const Scenario& scenario, const Config& config,
                            const RunOptions& options = {});

// Applies scenario seed and SOCIOBOT_SEED (environment wins) to a config.
Config with_seed(Config config, const Scenario& scenario);

}  // namespace sociobot::opsd

#endif  // SOCIOBOT_OPSD_SCENARIO_HPP_
