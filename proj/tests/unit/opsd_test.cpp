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

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "random_json.hpp"
#include "sociobot/behaviors/messages.hpp"
#include "sociobot/bus/tcp.hpp"
#include "sociobot/kinematics/urdf.hpp"
#include "sociobot/opsd/config.hpp"
#include "sociobot/opsd/gateway.hpp"
#include "sociobot/opsd/replay.hpp"
#include "sociobot/opsd/runtime.hpp"
#include "sociobot/opsd/scenario.hpp"
#include "test_paths.hpp"

namespace sociobot::opsd {
namespace {

using nlohmann::json;
using testing::source_dir;
namespace topics = behaviors::topics;

Config default_config() { return load_config(source_dir() / "configs" / "default.toml"); }

// Minimal valid config text rooted at the source tree.
std::string base_text() {
  return "[paths]\nmodel = \"" + (source_dir() / "models" / "sociobot.urdf").string() + "\"\n";
}

ConfigError config_error(const std::string& text) {
  try {
    parse_config(text, source_dir(), "test.toml");
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return ConfigError("", 0, "", "");
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) {
      old_ = old;
    }
    if (value != nullptr) {
      ::setenv(name, value, 1);
    } else {
      ::unsetenv(name);
    }
  }
  ~ScopedEnv() {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

// ---------------------------------------------------------------- config

TEST(Config, ShippedDefaultLoadsAndChecks) {
  ScopedEnv env("SOCIOBOT_SEED", nullptr);
  const Config c = default_config();
  EXPECT_EQ(c.world.dt, 1.0 / 120.0);
  EXPECT_EQ(c.tcp_port, 8765);
  EXPECT_EQ(c.ws_port, 8766);
  EXPECT_EQ(c.world.seed, 7u);
  EXPECT_EQ(c.camera_period, 6);
  EXPECT_EQ(c.world.default_gains.kp, 60.0);
  EXPECT_EQ(c.world.default_gains.kd, 14.0);
  EXPECT_EQ(c.world.gain_rules.at(1).gains.kp, 40.0);
  EXPECT_EQ(c.world.gain_rules.at(1).gains.kd, 12.0);
  EXPECT_EQ(c.world.gain_rules.at(0).gains.kp, 80.0);
  EXPECT_EQ(c.world.gain_rules.at(0).gains.kd, 16.0);
  EXPECT_EQ(c.world.face_noise_sigma, 0.02);
  EXPECT_TRUE(c.model.is_absolute());
  EXPECT_EQ(c.model, (source_dir() / "models" / "sociobot.urdf").lexically_normal());
  EXPECT_NO_THROW(check_config(c));
}

TEST(Config, MinimalFileUsesDefaults) {
  const Config c = parse_config(base_text(), source_dir());
  EXPECT_TRUE(c.scene.empty());
  EXPECT_EQ(c.bind, "127.0.0.1");
  EXPECT_EQ(c.recognition_threshold, 0.80);
}

TEST(Config, ValuesCommentsAndEscapes) {
  const Config c = parse_config(base_text() +
                                    "# full line comment\n"
                                    "[bus]\n"
                                    "bind = \"0.0.0.0\"   # trailing comment\n"
                                    "  tcp_port = 9000\n"
                                    "[camera]\n"
                                    "mount_link = \"we\\\"ird#link\"\n"
                                    "[tracking]\n"
                                    "k = 2.5e-1\n",
                                source_dir());
  EXPECT_EQ(c.bind, "0.0.0.0");
  EXPECT_EQ(c.tcp_port, 9000);
  EXPECT_EQ(c.world.camera.mount_link, "we\"ird#link");
  EXPECT_EQ(c.tracking.k, 0.25);
}

TEST(Config, ErrorsCarryLineAndField) {
  struct Case {
    std::string tail;
    int line;
    std::string field;
  };
  // base_text() is two lines, so the tail starts on line 3.
  const Case cases[] = {
      {"[sim]\nbogus = 1\n", 4, "sim.bogus"},
      {"[sim]\ndt = \"fast\"\n", 4, "sim.dt"},
      {"[sim]\ndt = 0\n", 4, "sim.dt"},
      {"[sim]\ncamera_period = 2.5\n", 4, "sim.camera_period"},
      {"[bus]\ntcp_port = 70000\n", 4, "bus.tcp_port"},
      {"[bus]\ntcp_port = 1\ntcp_port = 2\n", 5, "bus.tcp_port"},
      {"[bus]\nbind = \"open\n", 4, "bus.bind"},
      {"[bus]\nbind\n", 4, ""},
      {"[nope]\n", 3, "nope"},
      {"[paths]\nscene = 3\n", 4, "paths.scene"},
      {"[tracking]\neye_share = 1.5\n", 4, "tracking.eye_share"},
  };
  for (const Case& c : cases) {
    const ConfigError e = config_error(base_text() + c.tail);
    EXPECT_EQ(e.file(), "test.toml") << c.tail;
    EXPECT_EQ(e.line(), c.line) << c.tail << e.what();
    if (!c.field.empty()) {
      EXPECT_EQ(e.field(), c.field) << c.tail << e.what();
    }
    EXPECT_NE(std::string(e.what()).find("test.toml:" + std::to_string(c.line)), std::string::npos)
        << e.what();
  }
}

TEST(Config, ModelIsRequired) {
  const ConfigError e = config_error("[sim]\nseed = 3\n");
  EXPECT_EQ(e.field(), "paths.model");
}

TEST(Config, CameraInvariantsAreChecked) {
  const ConfigError e = config_error(base_text() + "[camera]\ncx = 500\n");
  EXPECT_EQ(e.field(), "camera");
}

TEST(Config, SeedFromEnvironmentWins) {
  {
    ScopedEnv env("SOCIOBOT_SEED", "12345");
    EXPECT_EQ(parse_config(base_text() + "[sim]\nseed = 3\n", source_dir()).world.seed, 12345u);
  }
  {
    ScopedEnv env("SOCIOBOT_SEED", "12x");
    EXPECT_EQ(config_error(base_text()).field(), "SOCIOBOT_SEED");
  }
  ScopedEnv env("SOCIOBOT_SEED", nullptr);
  EXPECT_EQ(parse_config(base_text() + "[sim]\nseed = 3\n", source_dir()).world.seed, 3u);
}

TEST(Config, CheckReportsMissingFiles) {
  Config c = parse_config(base_text() + "[paths]\n", source_dir());
  (void)c;
  Config bad = default_config();
  bad.scene = source_dir() / "scenes" / "missing.json";
  try {
    check_config(bad);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "paths.scene");
  }
  bad = default_config();
  bad.clip_dir = source_dir() / "nowhere";
  EXPECT_THROW(check_config(bad), ConfigError);
  EXPECT_THROW(load_config(source_dir() / "configs" / "absent.toml"), ConfigError);
}

// ---------------------------------------------------------------- runtime and sim node

struct Collected {
  std::vector<std::pair<std::string, bus::Envelope>> all;
  std::vector<bus::Envelope> on(std::string_view topic) const {
    std::vector<bus::Envelope> out;
    for (const auto& [publisher, env] : all) {
      if (env.topic == topic) out.push_back(env);
    }
    return out;
  }
};

void collect(Runtime& rt, Collected& c) {
  rt.broker().set_tap([&c](const bus::Envelope& env, std::string_view publisher) {
    c.all.emplace_back(std::string(publisher), env);
  });
}

TEST(Runtime, InitialStateAndCameraCadence) {
  Runtime rt(default_config());
  Collected c;
  collect(rt, c);
  for (int i = 0; i < 12; ++i) rt.step();
  const auto states = c.on(topics::kJointState);
  ASSERT_EQ(states.size(), 13u);
  EXPECT_EQ(states[0].stamp, 0.0);
  EXPECT_EQ(states[0].payload["tick"], 0);
  EXPECT_EQ(states[12].payload["tick"], 12);
  EXPECT_EQ(states[12].stamp, 12.0 / 120.0);
  // Frames at ticks 0, 6 and 12, each followed by detections.
  EXPECT_EQ(c.on(topics::kCameraImage).size(), 3u);
  EXPECT_EQ(c.on(topics::kCameraDetections).size(), 3u);
  EXPECT_EQ(c.on(topics::kWorldEvent).size(), 1u);
  for (const auto& [publisher, env] : c.all) {
    if (env.topic == topics::kJointState) EXPECT_EQ(publisher, "sim");
  }
}

TEST(Runtime, BadInputsAreLoggedNotFatal) {
  Runtime rt(default_config());
  Collected c;
  collect(rt, c);
  rt.step();
  bus::Envelope target;
  target.topic = std::string(topics::kJointTarget);
  target.payload = {{"targets", {{"no_such_joint", 1.0}}}};
  rt.inject(target);
  bus::Envelope cmd;
  cmd.topic = std::string(topics::kWorldCommand);
  cmd.payload = {{"op", "teleport"}};
  rt.inject(cmd);
  cmd.payload = {{"op", "set_object_pose"}, {"id", "unicorn"}, {"pose", {{"position", {0, 0, 0}}}}};
  rt.inject(cmd);
  cmd.payload = {{"op", "grasp"}, {"arm", "left"}};
  rt.inject(cmd);
  rt.step();
  std::vector<json> logs;
  for (const auto& env : c.on(topics::kConsoleLog)) logs.push_back(env.payload);
  ASSERT_EQ(logs.size(), 4u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(logs[i]["level"], "warn") << logs[i];
    EXPECT_EQ(logs[i]["node"], "sim");
  }
  EXPECT_NE(logs[0]["text"].get<std::string>().find("no_such_joint"), std::string::npos);
  EXPECT_NE(logs[1]["text"].get<std::string>().find("teleport"), std::string::npos);
  EXPECT_EQ(logs[3]["level"], "info");  // NoTarget is an outcome, not a fault
  const auto events = c.on(topics::kWorldEvent);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].payload["kind"], "grasp_failed");
}

TEST(Runtime, BehaviorWarningsReachTheConsoleLog) {
  Runtime rt(default_config());
  Collected c;
  collect(rt, c);
  bus::Envelope bad;
  bad.topic = std::string(topics::kTeleopFrame);
  bad.payload = {{"headset", "sideways"}};
  rt.inject(bad);
  rt.step();
  const auto logs = c.on(topics::kConsoleLog);
  ASSERT_EQ(logs.size(), 1u);
  EXPECT_EQ(logs[0].payload["level"], "warn");
  EXPECT_EQ(logs[0].payload["node"], "teleop");
}

TEST(Runtime, SceneEditsPublishAnEvent) {
  Runtime rt(default_config());
  Collected c;
  collect(rt, c);
  bus::Envelope cmd;
  cmd.topic = std::string(topics::kWorldCommand);
  cmd.payload = {{"op", "set_object_pose"}, {"id", "ball"}, {"pose", {{"position", {0.5, 0.1, 0.9}}}}};
  rt.inject(cmd);
  rt.step();
  const auto events = c.on(topics::kWorldEvent);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[1].payload["kind"], "set_object_pose");
  EXPECT_EQ(events[1].payload["objects"]["ball"]["pose"]["position"], json({0.5, 0.1, 0.9}));
  EXPECT_EQ(rt.world().object("ball").pose.position, Eigen::Vector3d(0.5, 0.1, 0.9));
}

TEST(Runtime, OffThreadPublishesWaitForTheNextTick) {
  Runtime rt(default_config());
  Collected c;
  collect(rt, c);
  for (int i = 0; i < 5; ++i) rt.step();
  std::thread other([&] {
    bus::Envelope env;
    env.topic = std::string(topics::kSpeechRecognized);
    env.stamp = 99.0;
    env.payload = {{"text", "say hello"}};
    rt.broker().publish(env, "remote");
  });
  other.join();
  EXPECT_EQ(rt.held_inputs(), 1u);
  EXPECT_TRUE(c.on(topics::kSpeechRecognized).empty());
  const double t = rt.time();
  rt.step();
  EXPECT_EQ(rt.held_inputs(), 0u);
  const auto speech = c.on(topics::kSpeechRecognized);
  ASSERT_EQ(speech.size(), 1u);
  EXPECT_EQ(speech[0].stamp, t);
  // The dialog node may also greet whoever is in view; look for the reply.
  const auto said = c.on(topics::kSpeechSay);
  const auto reply = std::find_if(said.begin(), said.end(),
                                  [](const bus::Envelope& e) { return e.payload["text"] == "hello"; });
  ASSERT_NE(reply, said.end());
  EXPECT_EQ(reply->stamp, rt.time());
}

// Every /joint/target any behavior publishes lies inside the joint limits,
// whatever the operator sends.
TEST(Runtime, PublishedTargetsStayWithinLimits) {
  const std::vector<std::string> commands = {
      "look at me", "track the red object", "track blue", "stop", "show joy", "be anger",
      "show surprise", "pick up the cube", "put it down", "pick up the ball", "say hi", "dance"};
  const std::vector<std::string> labels = {"neutral", "joy", "sadness", "surprise",
                                           "disgust", "anger", "fear"};
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Config config = default_config();
    config.world.seed = seed;
    Runtime rt(config);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::string> violations;
    const kin::KinematicTree& tree = rt.tree();
    rt.broker().set_tap([&](const bus::Envelope& env, std::string_view) {
      if (env.topic != topics::kJointTarget) return;
      for (const auto& [name, value] : env.payload["targets"].items()) {
        const auto slot = tree.movable_index(name);
        ASSERT_TRUE(slot) << name;
        const kin::JointSpec& joint = tree.movable_joint(*slot);
        ++checked;
        if (joint.position_limited() &&
            (value.get<double>() < *joint.limits->lower || value.get<double>() > *joint.limits->upper)) {
          violations.push_back(name + "=" + value.dump());
        }
      }
    });
    for (int k = 0; k < 40; ++k) {
      bus::Envelope env;
      switch (rng() % 4) {
        case 0:
          env.topic = std::string(topics::kSpeechRecognized);
          env.payload = {{"text", commands[rng() % commands.size()]}};
          break;
        case 1:
          env.topic = std::string(topics::kExpressionSet);
          env.payload = {{"label", labels[rng() % labels.size()]}, {"duration", 0.1 + u(rng) * 0.05}};
          break;
        case 2: {
          Eigen::Quaterniond q(u(rng), u(rng), u(rng), u(rng));
          q.normalize();
          env.topic = std::string(topics::kTeleopFrame);
          env.payload = {{"headset", {q.w(), q.x(), q.y(), q.z()}},
                         {"right", {{"pose", {{"position", {u(rng), u(rng), 1.0 + u(rng)}}}},
                                    {"grip", rng() % 2 == 0}}},
                         {"left", {{"pose", {{"position", {u(rng), u(rng), 1.0 + u(rng)}}}}}}};
          break;
        }
        default:
          env.topic = std::string(topics::kClipPlay);
          env.payload = {{"name", "pick_lift_place"}};
          break;
      }
      rt.inject(env);
      for (int i = 0; i < 15; ++i) rt.step();
    }
    rt.broker().set_tap({});
    EXPECT_TRUE(violations.empty()) << "seed " << seed << ": " << violations.front();
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Runtime, ClipLibraryLoadsShippedClips) {
  const Config c = default_config();
  const kin::KinematicTree tree = kin::load_urdf(c.model).tree;
  const auto library = load_clip_library(c.clip_dir, tree);
  ASSERT_EQ(library.count("pick_lift_place"), 1u);
  EXPECT_DOUBLE_EQ(library.at("pick_lift_place").duration(), 9.6);
}

// ---------------------------------------------------------------- scenario

TEST(Scenario, EmptyScriptPassesWithEmptyReport) {
  const Scenario s = parse_scenario(json::array());
  const ScenarioReport r = run_scenario(s, default_config());
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.asserts.empty());
  EXPECT_EQ(r.ticks, 0u);
  EXPECT_EQ(report_to_json(r)["asserts"], json::array());
}

TEST(Scenario, PastDeadlineFailsAndNamesTheAssertion) {
  const Scenario s = parse_scenario(json::parse(
      R"([{"assert": "clock ticks before time began", "topic": "/clock", "deadline": -1}])"));
  const ScenarioReport r = run_scenario(s, default_config());
  EXPECT_FALSE(r.passed);
  ASSERT_EQ(r.asserts.size(), 1u);
  EXPECT_EQ(r.asserts[0].name, "clock ticks before time began");
  EXPECT_FALSE(r.asserts[0].passed);
  EXPECT_FALSE(r.asserts[0].detail.empty());
  EXPECT_EQ(report_to_json(r)["asserts"][0]["name"], "clock ticks before time began");
}

TEST(Scenario, EventuallyAndAlways) {
  const Scenario s = parse_scenario(json::parse(R"({
    "duration": 0.5,
    "steps": [
      {"assert": "tick 30 reached", "topic": "/clock", "deadline": 0.3,
       "where": {"path": "/tick", "op": "eq", "value": 30}},
      {"assert": "time never negative", "topic": "/clock", "deadline": 0.4, "mode": "always",
       "where": {"path": "/time", "op": "ge", "value": 0}},
      {"assert": "tick 100 by 0.5 s", "topic": "/clock", "deadline": 0.5,
       "where": {"path": "/tick", "op": "eq", "value": 100}},
      {"assert": "always under tick 10", "topic": "/clock", "deadline": 0.4, "mode": "always",
       "where": {"path": "/tick", "op": "lt", "value": 10}},
      {"assert": "quiet topic", "topic": "/nobody/home", "deadline": 0.1, "mode": "always"}
    ]})"));
  const ScenarioReport r = run_scenario(s, default_config());
  EXPECT_FALSE(r.passed);
  ASSERT_EQ(r.asserts.size(), 5u);
  EXPECT_TRUE(r.asserts[0].passed);
  EXPECT_DOUBLE_EQ(*r.asserts[0].time, 30.0 / 120.0);
  EXPECT_TRUE(r.asserts[1].passed);
  EXPECT_FALSE(r.asserts[2].passed);
  EXPECT_FALSE(r.asserts[3].passed);
  EXPECT_DOUBLE_EQ(*r.asserts[3].time, 10.0 / 120.0);
  EXPECT_FALSE(r.asserts[4].passed);
  EXPECT_EQ(r.ticks, 60u);
}

TEST(Scenario, PublishesLandAtTheirTick) {
  const Scenario s = parse_scenario(json::parse(R"([
    {"at": 0.25, "publish": "/speech/recognized", "payload": {"text": "say late"}},
    {"at": 0.1, "publish": "/speech/recognized", "payload": {"text": "say early"}},
    {"assert": "early reply", "topic": "/speech/say", "deadline": 0.2,
     "where": {"path": "/text", "op": "eq", "value": "early"}},
    {"assert": "late reply", "topic": "/speech/say", "from": 0.25, "deadline": 0.3,
     "where": {"path": "/text", "op": "eq", "value": "late"}}
  ])"));
  ASSERT_EQ(s.publishes.size(), 2u);
  EXPECT_EQ(s.publishes[0].at, 0.1);  // sorted by time
  std::ostringstream log;
  RunOptions options;
  options.log = &log;
  const ScenarioReport r = run_scenario(s, default_config(), options);
  EXPECT_TRUE(r.passed) << report_to_json(r).dump(2);
  std::istringstream in(log.str());
  const BusLog parsed = read_log(in);
  for (const LogRecord& rec : parsed.records) {
    if (rec.envelope.topic == topics::kSpeechRecognized) {
      EXPECT_EQ(rec.publisher, "scenario");
      const double ticks = rec.envelope.stamp * 120.0;
      EXPECT_NEAR(ticks, std::round(ticks), 1e-9);
    }
  }
}

TEST(Scenario, PredicateOps) {
  const json payload = json::parse(
      R"({"a": 1.5, "s": "hello world", "list": [1, 2, 3], "obj": {"k": null}, "v": [3.0, 4.0, 9.0]})");
  const auto check = [&](const std::string& path, const std::string& op, json value,
                         double tol = 0.0) {
    return evaluate(Predicate{path, op, std::move(value), tol}, payload);
  };
  EXPECT_TRUE(check("/a", "eq", 1.5));
  EXPECT_FALSE(check("/a", "eq", "1.5"));
  EXPECT_TRUE(check("/a", "ne", 2));
  EXPECT_TRUE(check("/a", "near", 1.6, 0.1 + 1e-12));
  EXPECT_FALSE(check("/a", "near", 1.7, 0.1));
  EXPECT_TRUE(check("/a", "lt", 2));
  EXPECT_TRUE(check("/a", "le", 1.5));
  EXPECT_FALSE(check("/a", "gt", 1.5));
  EXPECT_TRUE(check("/a", "ge", 1.5));
  EXPECT_FALSE(check("/s", "lt", 2));  // not a number
  EXPECT_TRUE(check("/s", "contains", "lo wo"));
  EXPECT_TRUE(check("/list", "contains", 2));
  EXPECT_FALSE(check("/list", "contains", 4));
  EXPECT_TRUE(check("/obj", "contains", "k"));
  EXPECT_TRUE(check("/obj/k", "exists", nullptr));
  EXPECT_FALSE(check("/obj/missing", "exists", nullptr));
  EXPECT_FALSE(check("/missing", "eq", nullptr));
  EXPECT_TRUE(check("/v", "within", json({0.0, 0.0}), 5.0));
  EXPECT_FALSE(check("/v", "within", json({0.0, 0.0}), 4.999));
  EXPECT_FALSE(check("/v", "within", json({0.0, 0.0, 0.0, 0.0}), 100.0));
  EXPECT_TRUE(check("", "contains", "a"));
}

TEST(Scenario, MalformedScriptsAreRejected) {
  const char* bad[] = {
      R"({"steps": 3})",
      R"([{"at": 1}])",
      R"([{"at": "soon", "publish": "/x"}])",
      R"([{"at": 0, "publish": "no_slash"}])",
      R"([{"assert": "a", "topic": "/x"}])",
      R"([{"assert": "a", "topic": "/x", "deadline": 1, "where": {"op": "like", "value": 1}}])",
      R"([{"assert": "a", "topic": "/x", "deadline": 1, "where": {"op": "lt", "value": "b"}}])",
      R"([{"assert": "a", "topic": "/x", "deadline": 1, "where": {"path": "no-slash", "value": 1}}])",
      R"([{"assert": "a", "topic": "/x", "deadline": 1, "mode": "sometimes"}])",
      R"({"steps": [], "colour": "red"})",
      R"([{"assert": "a", "topic": "/x", "deadline": 1, "where": {"op": "within", "value": []}}])",
  };
  for (const char* text : bad) {
    EXPECT_THROW(parse_scenario(json::parse(text)), ScenarioError) << text;
  }
}

TEST(Scenario, SeedPrecedence) {
  Scenario s;
  s.seed = 99;
  Config c = default_config();
  c.world.seed = 1;
  {
    ScopedEnv env("SOCIOBOT_SEED", nullptr);
    EXPECT_EQ(with_seed(c, s).world.seed, 99u);
    EXPECT_EQ(with_seed(c, Scenario{}).world.seed, 1u);
  }
  ScopedEnv env("SOCIOBOT_SEED", "5");
  EXPECT_EQ(with_seed(c, s).world.seed, 1u);  // config already carries the env seed
}

class ShippedScenario : public ::testing::TestWithParam<std::string> {};

TEST_P(ShippedScenario, Passes) {
  ScopedEnv env("SOCIOBOT_SEED", nullptr);
  const auto path = source_dir() / "scenarios" / (GetParam() + ".json");
  const Scenario s = load_scenario(path);
  ASSERT_TRUE(s.config);
  const ScenarioReport r = run_scenario(s, load_config(*s.config));
  EXPECT_TRUE(r.passed) << report_to_json(r).dump(2);
  EXPECT_FALSE(r.asserts.empty());
}

INSTANTIATE_TEST_SUITE_P(All, ShippedScenario,
                         ::testing::Values("tracking", "recognition", "expressions",
                                           "pick_lift_place", "teleop_replay"));

// ---------------------------------------------------------------- replay

std::string run_logged(const std::string& name, std::uint64_t seed) {
  const Scenario s = load_scenario(source_dir() / "scenarios" / (name + ".json"));
  Config c = load_config(*s.config);
  c.world.seed = seed;
  Scenario unseeded = s;
  unseeded.seed.reset();
  std::ostringstream log;
  RunOptions options;
  options.log = &log;
  run_scenario(unseeded, c, options);
  return log.str();
}

std::vector<std::string> joint_state_lines(const std::string& log) {
  std::vector<std::string> out;
  std::istringstream in(log);
  for (std::string line; std::getline(in, line);) {
    if (line.find("\"topic\":\"/joint/state\"") != std::string::npos) out.push_back(line);
  }
  return out;
}

TEST(Replay, SameSeedGivesIdenticalJointState) {
  const auto a = joint_state_lines(run_logged("expressions", 11));
  const auto b = joint_state_lines(run_logged("expressions", 11));
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

TEST(Replay, ReplayReproducesTheLog) {
  ScopedEnv env("SOCIOBOT_SEED", nullptr);
  const std::string log = run_logged("teleop_replay", 3);
  std::istringstream in(log);
  const BusLog parsed = read_log(in);
  EXPECT_EQ(parsed.seed, 3u);
  const ReplayResult r = replay_log(parsed, default_config());
  EXPECT_TRUE(r.identical) << r.detail;
  EXPECT_EQ(r.expected, r.produced);
  EXPECT_GT(r.inputs, 25u);
}

TEST(Replay, TamperedLogIsDetected) {
  ScopedEnv env("SOCIOBOT_SEED", nullptr);
  std::istringstream in(run_logged("expressions", 3));
  BusLog parsed = read_log(in);
  std::size_t n = 0;
  for (LogRecord& r : parsed.records) {
    if (r.envelope.topic == topics::kJointState && ++n == 50) {
      r.envelope.payload["position"][7] = r.envelope.payload["position"][7].get<double>() + 1e-15;
    }
  }
  const ReplayResult r = replay_log(parsed, default_config());
  EXPECT_FALSE(r.identical);
  EXPECT_NE(r.detail.find("#50"), std::string::npos) << r.detail;
}

TEST(Replay, InputClassification) {
  const auto rec = [](std::string publisher, std::string topic, json payload = json::object()) {
    LogRecord r;
    r.publisher = std::move(publisher);
    r.envelope.topic = std::move(topic);
    r.envelope.payload = std::move(payload);
    return r;
  };
  EXPECT_TRUE(is_input(rec("gateway", "/joint/target")));
  EXPECT_TRUE(is_input(rec("scenario", "/speech/recognized")));
  EXPECT_FALSE(is_input(rec("tracker", "/joint/target")));
  EXPECT_FALSE(is_input(rec("sim", "/joint/state")));
  EXPECT_TRUE(is_input(rec("", "/speech/recognized")));
  EXPECT_TRUE(is_input(rec("", "/teleop/frame")));
  EXPECT_FALSE(is_input(rec("", "/joint/target")));
  EXPECT_FALSE(is_input(rec("", "/world/command", {{"op", "grasp"}})));
  EXPECT_TRUE(is_input(rec("", "/world/command", {{"op", "set_object_pose"}})));
}

TEST(Replay, ReadsAnonymousAndAnnotatedLines) {
  bus::Envelope env;
  env.topic = "/speech/recognized";
  env.stamp = 0.5;
  env.payload = {{"text", "hi"}};
  std::istringstream in("{\"sociobot_log\":1,\"seed\":4,\"dt\":0.5}\n\n" + bus::dump_envelope(env) +
                        "\n{\"publisher\":\"x\",\"envelope\":" + bus::dump_envelope(env) + "}\n");
  const BusLog log = read_log(in);
  EXPECT_EQ(log.seed, 4u);
  EXPECT_EQ(log.dt, 0.5);
  ASSERT_EQ(log.records.size(), 2u);
  EXPECT_EQ(log.records[0].publisher, "");
  EXPECT_EQ(log.records[1].publisher, "x");
  EXPECT_EQ(log.records[1].envelope, env);
  std::istringstream broken("{\"topic\": 3}\n");
  EXPECT_THROW(read_log(broken), ScenarioError);
}

// ---------------------------------------------------------------- gateway

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;

class WsClient {
 public:
  explicit WsClient(std::uint16_t port) : ws_(io_) {
    ws_.next_layer().connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
    ws_.handshake("127.0.0.1", "/bus");
    ws_.text(true);
  }

  void send(const std::string& text) { ws_.write(asio::buffer(text)); }

  std::optional<std::string> read(std::chrono::milliseconds timeout = std::chrono::seconds(5)) {
    std::optional<std::string> out;
    bool done = false;
    buffer_.consume(buffer_.size());
    ws_.async_read(buffer_, [&](beast::error_code ec, std::size_t) {
      done = true;
      if (!ec) out = beast::buffers_to_string(buffer_.data());
    });
    io_.restart();
    io_.run_for(timeout);
    if (!done) {
      ws_.next_layer().cancel();
      io_.restart();
      io_.run();
    }
    return out;
  }

  // Reads until an envelope on `topic` arrives.
  std::optional<json> read_topic(std::string_view topic) {
    for (int i = 0; i < 1000; ++i) {
      const auto text = read();
      if (!text) return std::nullopt;
      json j = json::parse(*text);
      if (j["topic"] == topic) return j;
    }
    return std::nullopt;
  }

  void subscribe(const std::string& pattern) {
    send(json{{"subscribe", pattern}}.dump());
    const auto ack = read_topic("/meta/subscribed");
    ASSERT_TRUE(ack);
    ASSERT_EQ((*ack)["payload"]["pattern"], pattern);
  }

 private:
  asio::io_context io_;
  websocket::stream<tcp::socket> ws_;
  beast::flat_buffer buffer_;
};

http::response<http::string_body> http_get(std::uint16_t port, const std::string& target,
                                           http::verb verb = http::verb::get) {
  asio::io_context io;
  tcp::socket socket(io);
  socket.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), port));
  http::request<http::empty_body> req(verb, target, 11);
  req.set(http::field::host, "127.0.0.1");
  req.keep_alive(false);
  http::write(socket, req);
  beast::flat_buffer buffer;
  http::response_parser<http::string_body> parser;
  if (verb == http::verb::head) parser.skip(true);
  http::read(socket, buffer, parser);
  return parser.release();
}

bool wait_for(const std::function<bool()>& pred) {
  for (int i = 0; i < 500; ++i) {
    if (pred()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return false;
}

TEST(Gateway, StaticPathResolution) {
  const std::filesystem::path root = "/srv/console";
  EXPECT_EQ(resolve_static(root, "/"), root / "index.html");
  EXPECT_EQ(resolve_static(root, "/app.js?v=3"), root / "app.js");
  EXPECT_EQ(resolve_static(root, "/a/./b.css"), root / "a" / "b.css");
  EXPECT_EQ(resolve_static(root, "/a/"), root / "a" / "index.html");
  EXPECT_TRUE(resolve_static(root, "/../etc/passwd").empty());
  EXPECT_TRUE(resolve_static(root, "/a/../../x").empty());
  EXPECT_TRUE(resolve_static(root, "/a%2f..%2f..%2fx").empty());
  EXPECT_TRUE(resolve_static(root, "/a\\..\\x").empty());
  EXPECT_TRUE(resolve_static(root, "relative").empty());
  EXPECT_TRUE(resolve_static({}, "/").empty());
  EXPECT_EQ(content_type("x.html"), "text/html; charset=utf-8");
  EXPECT_EQ(content_type("x.js"), "text/javascript; charset=utf-8");
  EXPECT_EQ(content_type("x.bin"), "application/octet-stream");
}

class GatewayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("sociobot_gw_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_ / "js");
    std::ofstream(dir_ / "index.html") << "<p>hi</p>";
    std::ofstream(dir_ / "js" / "app.js") << "console.log(1);";
    gateway_ = std::make_unique<Gateway>(broker_, 0, "127.0.0.1", dir_);
  }
  void TearDown() override {
    gateway_.reset();
    std::filesystem::remove_all(dir_);
  }

  bus::Broker broker_;
  std::filesystem::path dir_;
  std::unique_ptr<Gateway> gateway_;
};

TEST_F(GatewayTest, ServesStaticFiles) {
  auto res = http_get(gateway_->port(), "/");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res.body(), "<p>hi</p>");
  EXPECT_EQ(res[http::field::content_type], "text/html; charset=utf-8");
  res = http_get(gateway_->port(), "/js/app.js");
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(res.body(), "console.log(1);");
  res = http_get(gateway_->port(), "/js/app.js", http::verb::head);
  EXPECT_EQ(res.result(), http::status::ok);
  EXPECT_EQ(http_get(gateway_->port(), "/missing.css").result(), http::status::not_found);
  EXPECT_EQ(http_get(gateway_->port(), "/../secret").result(), http::status::bad_request);
  EXPECT_EQ(http_get(gateway_->port(), "/", http::verb::post).result(),
            http::status::method_not_allowed);
}

TEST_F(GatewayTest, SubscribedEnvelopesArriveByteExact) {
  WsClient ws(gateway_->port());
  ws.subscribe("/test/*");
  std::mt19937_64 rng(17);
  std::vector<std::string> sent;
  for (int i = 0; i < 200; ++i) {
    bus::Envelope env = testing::random_envelope(rng);
    env.topic = "/test" + env.topic;
    sent.push_back(bus::dump_envelope(broker_.publish(env)));
    if (i % 10 == 0) {
      bus::Envelope other = env;
      other.topic = "/elsewhere";
      broker_.publish(other);
    }
  }
  for (const std::string& expected : sent) {
    const auto got = ws.read();
    ASSERT_TRUE(got);
    EXPECT_EQ(*got, expected);
  }
  EXPECT_FALSE(ws.read(std::chrono::milliseconds(100)));
}

TEST_F(GatewayTest, ClientEnvelopesArePublishedAndRestamped) {
  broker_.set_clock([] { return 4.25; });
  std::vector<std::string> publishers;
  broker_.set_tap([&](const bus::Envelope&, std::string_view p) { publishers.emplace_back(p); });
  auto sub = broker_.subscribe("/speech/recognized");
  WsClient ws(gateway_->port());
  ws.send(R"({"topic": "/speech/recognized", "seq": 0, "stamp": 100, "type": "Speech", "payload": {"text": "look at me"}})");
  ASSERT_TRUE(wait_for([&] { return sub->size() == 1; }));
  const bus::Envelope got = *sub->try_pop();
  EXPECT_EQ(got.stamp, 4.25);
  EXPECT_EQ(got.seq, 1u);
  EXPECT_EQ(got.payload["text"], "look at me");
  broker_.set_tap({});
  ASSERT_EQ(publishers.size(), 1u);
  EXPECT_EQ(publishers[0], "gateway");
}

TEST_F(GatewayTest, ControlErrors) {
  WsClient ws(gateway_->port());
  ws.send("{not json");
  auto err = ws.read_topic("/meta/error");
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["payload"]["code"], "BadJson");
  ws.send(R"({"subscribe": "no/slash"})");
  err = ws.read_topic("/meta/error");
  ASSERT_TRUE(err);
  EXPECT_EQ((*err)["payload"]["code"], "BadPattern");
  ws.send(R"({"topic": "/meta/hello", "payload": {}})");
  err = ws.read_topic("/meta/error");
  ASSERT_TRUE(err);
  ws.send(R"({"subscribe": "/ok"})");
  EXPECT_TRUE(ws.read_topic("/meta/subscribed"));
  ws.send(R"({"unsubscribe": "/ok"})");
  EXPECT_TRUE(ws.read_topic("/meta/unsubscribed"));
  EXPECT_EQ(gateway_->session_count(), 1u);
}

TEST_F(GatewayTest, SlowClientKeepsNewest256) {
  WsClient ws(gateway_->port());
  ws.subscribe("/flood");
  // Stop the gateway thread from draining while we publish, so the session
  // queue overflows deterministically.
  std::vector<std::string> sent;
  {
    bus::Broker& b = broker_;
    auto blocker = std::make_shared<std::atomic<bool>>(true);
    // Publishing 5000 envelopes in a tight loop outruns the socket; the
    // session queue never holds more than 256 of them.
    for (int i = 0; i < 5000; ++i) {
      bus::Envelope env;
      env.topic = "/flood";
      env.payload = {{"i", i}};
      sent.push_back(bus::dump_envelope(b.publish(env)));
    }
  }
  std::vector<int> seen;
  while (auto text = ws.read(std::chrono::milliseconds(300))) {
    seen.push_back(json::parse(*text)["payload"]["i"].get<int>());
  }
  ASSERT_FALSE(seen.empty());
  EXPECT_EQ(seen.back(), 4999);
  for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_LT(seen[i - 1], seen[i]);
}

TEST(GatewayBridge, TcpAndWebSocketSeeTheSameBytes) {
  bus::Broker broker;
  bus::TcpServer tcp_server(broker, 0);
  Gateway gateway(broker, 0);
  bus::BusClient tcp_client("127.0.0.1", tcp_server.port(), "tcp-side");
  tcp_client.subscribe("/bridge/*");
  WsClient ws(gateway.port());
  ws.subscribe("/bridge/*");

  // Broker-published envelopes: identical canonical bytes on both sides.
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    bus::Envelope env = testing::random_envelope(rng);
    env.topic = "/bridge" + env.topic;
    broker.publish(env, "test");
    const auto from_tcp = tcp_client.next(std::chrono::seconds(5));
    const auto from_ws = ws.read();
    ASSERT_TRUE(from_tcp && from_ws);
    EXPECT_EQ(bus::dump_envelope(*from_tcp), *from_ws);
  }

  // WebSocket -> TCP and TCP -> WebSocket.
  bus::Envelope a;
  a.topic = "/bridge/from_ws";
  a.type = "T";
  a.payload = testing::random_json(rng, 3);
  ws.send(bus::dump_envelope(a));
  const auto at_tcp = tcp_client.next(std::chrono::seconds(5));
  const auto echo_ws = ws.read();
  ASSERT_TRUE(at_tcp && echo_ws);
  EXPECT_EQ(at_tcp->payload, a.payload);
  EXPECT_EQ(bus::dump_envelope(*at_tcp), *echo_ws);

  tcp_client.publish("/bridge/from_tcp", "T", a.payload);
  const auto at_ws = ws.read();
  const auto echo_tcp = tcp_client.next(std::chrono::seconds(5));
  ASSERT_TRUE(at_ws && echo_tcp);
  EXPECT_EQ(*at_ws, bus::dump_envelope(*echo_tcp));
}

TEST(GatewayBridge, LiveRuntimeStreamsToWebSocket) {
  Config config = default_config();
  Runtime rt(config);
  Gateway gateway(rt.broker(), 0, "127.0.0.1", config.console_dir);
  WsClient ws(gateway.port());
  ws.subscribe("/speech/say");
  ws.send(R"({"topic": "/speech/recognized", "type": "Speech", "payload": {"text": "say over the wire"}})");
  ASSERT_TRUE(wait_for([&] { return rt.held_inputs() == 1; }));
  rt.step();
  std::optional<json> said;
  while ((said = ws.read_topic("/speech/say")) && (*said)["payload"]["text"] != "over the wire") {
  }
  ASSERT_TRUE(said);
  EXPECT_EQ((*said)["stamp"], rt.time());
}

}  // namespace
}  // namespace sociobot::opsd
