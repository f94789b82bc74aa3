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

#include "sociobot/opsd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "sociobot/bus/envelope.hpp"
#include "sociobot/opsd/runtime.hpp"

namespace sociobot::opsd {

using nlohmann::json;

namespace {

// Stamps are multiples of dt; this absorbs the rounding in t = tick * dt.
constexpr double kTimeSlack = 1e-9;

const char* const kOps[] = {"eq", "ne", "near", "lt", "le", "gt", "ge", "contains", "within", "exists"};

[[noreturn]] void fail(std::size_t step, const std::string& what) {
  throw ScenarioError("step " + std::to_string(step) + ": " + what);
}

double number(const json& j, const char* field, std::size_t step) {
  if (!j.contains(field) || !j[field].is_number()) {
    fail(step, std::string("'") + field + "' must be a number");
  }
  const double v = j[field].get<double>();
  if (!std::isfinite(v)) {
    fail(step, std::string("'") + field + "' must be finite");
  }
  return v;
}

std::string text(const json& j, const char* field, std::size_t step) {
  if (!j.contains(field) || !j[field].is_string()) {
    fail(step, std::string("'") + field + "' must be a string");
  }
  return j[field].get<std::string>();
}

Predicate parse_predicate(const json& j, std::size_t step) {
  if (!j.is_object()) {
    fail(step, "a predicate must be an object");
  }
  Predicate p;
  if (j.contains("path")) {
    p.path = text(j, "path", step);
    try {
      (void)json::json_pointer(p.path);
    } catch (const json::exception& e) {
      fail(step, "bad path '" + p.path + "': " + e.what());
    }
  }
  if (j.contains("op")) {
    p.op = text(j, "op", step);
  }
  if (std::find(std::begin(kOps), std::end(kOps), p.op) == std::end(kOps)) {
    fail(step, "unknown op '" + p.op + "'");
  }
  if (p.op != "exists") {
    if (!j.contains("value")) {
      fail(step, "op '" + p.op + "' needs a value");
    }
    p.value = j["value"];
  }
  if (j.contains("tolerance")) {
    p.tolerance = number(j, "tolerance", step);
    if (p.tolerance < 0.0) {
      fail(step, "'tolerance' must be >= 0");
    }
  }
  const bool numeric = p.op == "near" || p.op == "lt" || p.op == "le" || p.op == "gt" ||
                       p.op == "ge";
  if (numeric && !p.value.is_number()) {
    fail(step, "op '" + p.op + "' needs a numeric value");
  }
  if (p.op == "within") {
    if (!p.value.is_array() || p.value.empty() ||
        !std::all_of(p.value.begin(), p.value.end(), [](const json& v) { return v.is_number(); })) {
      fail(step, "op 'within' needs a non-empty numeric array");
    }
  }
  return p;
}

std::string describe(const Predicate& p) {
  std::string out = (p.path.empty() ? std::string("payload") : p.path) + " " + p.op;
  if (p.op != "exists") {
    out += " " + p.value.dump();
  }
  if (p.op == "near" || p.op == "within") {
    std::ostringstream tol;
    tol << p.tolerance;
    out += " +/- " + tol.str();
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  Scenario scenario;
  const json* steps = &doc;
  if (doc.is_object()) {
    for (const auto& [key, value] : doc.items()) {
      if (key != "name" && key != "config" && key != "seed" && key != "duration" &&
          key != "steps") {
        throw ScenarioError("unknown scenario key '" + key + "'");
      }
    }
    if (doc.contains("name")) {
      if (!doc["name"].is_string()) {
        throw ScenarioError("'name' must be a string");
      }
      scenario.name = doc["name"].get<std::string>();
    }
    if (doc.contains("config")) {
      if (!doc["config"].is_string()) {
        throw ScenarioError("'config' must be a string");
      }
      scenario.config = base_dir / doc["config"].get<std::string>();
    }
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned()) {
        throw ScenarioError("'seed' must be an unsigned integer");
      }
      scenario.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("duration")) {
      if (!doc["duration"].is_number() || doc["duration"].get<double>() < 0.0) {
        throw ScenarioError("'duration' must be a non-negative number");
      }
      scenario.duration = doc["duration"].get<double>();
    }
    if (!doc.contains("steps")) {
      throw ScenarioError("scenario object needs 'steps'");
    }
    steps = &doc["steps"];
  }
  if (!steps->is_array()) {
    throw ScenarioError("scenario steps must be a list");
  }

  for (std::size_t i = 0; i < steps->size(); ++i) {
    const json& s = (*steps)[i];
    if (!s.is_object()) {
      fail(i, "must be an object");
    }
    if (s.contains("publish")) {
      ScenarioPublish p;
      p.topic = text(s, "publish", i);
      if (!bus::valid_topic(p.topic)) {
        fail(i, "bad topic '" + p.topic + "'");
      }
      p.at = number(s, "at", i);
      p.type = s.contains("type") ? text(s, "type", i) : std::string("Json");
      p.payload = s.contains("payload") ? s["payload"] : json::object();
      if (s.contains("publisher")) {
        p.publisher = text(s, "publisher", i);
      }
      scenario.publishes.push_back(std::move(p));
    } else if (s.contains("assert")) {
      ScenarioAssert a;
      a.name = text(s, "assert", i);
      a.topic = text(s, "topic", i);
      if (!bus::valid_topic(a.topic)) {
        fail(i, "bad topic '" + a.topic + "'");
      }
      a.deadline = number(s, "deadline", i);
      if (s.contains("from")) {
        a.from = number(s, "from", i);
      }
      if (s.contains("mode")) {
        const std::string mode = text(s, "mode", i);
        if (mode == "always") {
          a.mode = ScenarioAssert::Mode::kAlways;
        } else if (mode != "eventually") {
          fail(i, "mode must be 'eventually' or 'always'");
        }
      }
      if (s.contains("where")) {
        if (s["where"].is_array()) {
          for (const json& p : s["where"]) {
            a.where.push_back(parse_predicate(p, i));
          }
        } else {
          a.where.push_back(parse_predicate(s["where"], i));
        }
      }
      scenario.asserts.push_back(std::move(a));
    } else {
      fail(i, "needs 'publish' or 'assert'");
    }
  }
  std::stable_sort(scenario.publishes.begin(), scenario.publishes.end(),
                   [](const ScenarioPublish& a, const ScenarioPublish& b) { return a.at < b.at; });
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open scenario " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  try {
    Scenario s = parse_scenario(doc, path.parent_path());
    if (s.name.empty()) {
      s.name = path.stem().string();
    }
    return s;
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

bool evaluate(const Predicate& p, const json& payload) {
  const json::json_pointer ptr(p.path);
  if (!payload.contains(ptr)) {
    return false;
  }
  const json& x = payload.at(ptr);
  if (p.op == "exists") {
    return true;
  }
  if (p.op == "eq") {
    return x == p.value;
  }
  if (p.op == "ne") {
    return x != p.value;
  }
  if (p.op == "contains") {
    if (x.is_string() && p.value.is_string()) {
      return x.get<std::string>().find(p.value.get<std::string>()) != std::string::npos;
    }
    if (x.is_array()) {
      return std::find(x.begin(), x.end(), p.value) != x.end();
    }
    if (x.is_object() && p.value.is_string()) {
      return x.contains(p.value.get<std::string>());
    }
    return false;
  }
  if (p.op == "within") {
    if (!x.is_array() || x.size() < p.value.size()) {
      return false;
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      if (!x[i].is_number()) {
        return false;
      }
      const double d = x[i].get<double>() - p.value[i].get<double>();
      sq += d * d;
    }
    return std::sqrt(sq) <= p.tolerance;
  }
  if (!x.is_number()) {
    return false;
  }
  const double a = x.get<double>();
  const double b = p.value.get<double>();
  if (p.op == "near") {
    return std::abs(a - b) <= p.tolerance;
  }
  if (p.op == "lt") {
    return a < b;
  }
  if (p.op == "le") {
    return a <= b;
  }
  if (p.op == "gt") {
    return a > b;
  }
  if (p.op == "ge") {
    return a >= b;
  }
  return false;
}

json report_to_json(const ScenarioReport& report) {
  json asserts = json::array();
  for (const AssertResult& r : report.asserts) {
    asserts.push_back({{"name", r.name},
                       {"passed", r.passed},
                       {"time", r.time ? json(*r.time) : json(nullptr)},
                       {"seen", r.seen},
                       {"detail", r.detail}});
  }
  return {{"name", report.name},
          {"passed", report.passed},
          {"ticks", report.ticks},
          {"sim_time", report.sim_time},
          {"asserts", std::move(asserts)}};
}

Config with_seed(Config config, const Scenario& scenario) {
  if (scenario.seed && std::getenv("SOCIOBOT_SEED") == nullptr) {
    config.world.seed = *scenario.seed;
  }
  return config;
}

ScenarioReport run_scenario(const Scenario& scenario, const Config& config,
                            const RunOptions& options) {
  ScenarioReport report;
  report.name = scenario.name;
  for (const ScenarioAssert& a : scenario.asserts) {
    report.asserts.push_back({a.name, false, std::nullopt, 0, {}});
  }
  if (scenario.publishes.empty() && scenario.asserts.empty() && scenario.duration <= 0.0) {
    return report;
  }

  Runtime runtime(with_seed(config, scenario));
  if (options.log != nullptr) {
    runtime.set_log(options.log);
  }
  std::vector<std::shared_ptr<bus::Subscription>> subs;
  for (const ScenarioAssert& a : scenario.asserts) {
    subs.push_back(runtime.broker().subscribe(a.topic, std::size_t{1} << 16));
  }
  std::vector<bool> decided(scenario.asserts.size(), false);
  std::vector<std::string> last_value(scenario.asserts.size());

  std::size_t next_publish = 0;
  const auto finished = [&] {
    return next_publish == scenario.publishes.size() &&
           std::all_of(decided.begin(), decided.end(), [](bool d) { return d; }) &&
           runtime.time() + kTimeSlack >= scenario.duration;
  };

  while (!finished()) {
    while (next_publish < scenario.publishes.size() &&
           scenario.publishes[next_publish].at <= runtime.time() + kTimeSlack) {
      const ScenarioPublish& p = scenario.publishes[next_publish++];
      bus::Envelope env;
      env.topic = p.topic;
      env.type = p.type;
      env.payload = p.payload;
      runtime.inject(std::move(env), p.publisher);
    }
    runtime.step();
    if (options.on_step) {
      options.on_step(runtime);
    }

    for (std::size_t i = 0; i < scenario.asserts.size(); ++i) {
      const ScenarioAssert& a = scenario.asserts[i];
      AssertResult& r = report.asserts[i];
      for (const bus::Envelope& env : subs[i]->drain()) {
        if (decided[i] || env.stamp + kTimeSlack < a.from || env.stamp > a.deadline + kTimeSlack) {
          continue;
        }
        ++r.seen;
        const Predicate* failed = nullptr;
        for (const Predicate& p : a.where) {
          if (!evaluate(p, env.payload)) {
            failed = &p;
            break;
          }
        }
        if (!a.where.empty()) {
          const json::json_pointer ptr(a.where.front().path);
          last_value[i] = env.payload.contains(ptr) ? env.payload.at(ptr).dump() : "missing";
        }
        if (a.mode == ScenarioAssert::Mode::kEventually && failed == nullptr) {
          decided[i] = true;
          r.passed = true;
          r.time = env.stamp;
        } else if (a.mode == ScenarioAssert::Mode::kAlways && failed != nullptr) {
          decided[i] = true;
          r.time = env.stamp;
          r.detail = "violated: " + describe(*failed) + " (got " +
                     (env.payload.contains(json::json_pointer(failed->path))
                          ? env.payload.at(json::json_pointer(failed->path)).dump()
                          : std::string("missing")) +
                     ")";
        }
      }
      if (!decided[i] && runtime.time() >= a.deadline - kTimeSlack) {
        decided[i] = true;
        if (a.mode == ScenarioAssert::Mode::kAlways) {
          r.passed = r.seen > 0;
          if (!r.passed) {
            r.detail = "no envelope on " + a.topic + " before the deadline";
          }
        } else {
          std::string what = a.where.empty() ? std::string("an envelope") : describe(a.where.front());
          for (std::size_t k = 1; k < a.where.size(); ++k) {
            what += " and " + describe(a.where[k]);
          }
          std::ostringstream deadline;
          deadline << a.deadline;
          r.detail = "deadline " + deadline.str() + " s passed without " + what +
                     " (" + std::to_string(r.seen) + " envelopes seen" +
                     (last_value[i].empty() ? std::string() : ", last " + last_value[i]) + ")";
        }
      }
    }
  }
  for (const AssertResult& r : report.asserts) {
    report.passed = report.passed && r.passed;
  }
  report.ticks = runtime.tick();
  report.sim_time = runtime.time();
  return report;
}

}  // namespace sociobot::opsd
