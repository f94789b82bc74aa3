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

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sociobot/behaviors/clips.hpp"
#include "sociobot/bus/envelope.hpp"
#include "sociobot/bus/tcp.hpp"
#include "sociobot/kinematics/urdf.hpp"
#include "sociobot/opsd/config.hpp"
#include "sociobot/opsd/gateway.hpp"
#include "sociobot/opsd/replay.hpp"
#include "sociobot/opsd/runtime.hpp"
#include "sociobot/opsd/scenario.hpp"
#include "sociobot/sim/scene.hpp"

namespace {

using namespace sociobot;
using nlohmann::json;

constexpr int kExitFailed = 1;
constexpr int kExitError = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8765;
};

void add_endpoint(CLI::App* cmd, Endpoint& ep) {
  cmd->add_option("--host", ep.host, "Daemon address");
  cmd->add_option("--port", ep.port, "Daemon TCP port");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
  return out;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string config;
  bool fast = false;
  std::optional<std::uint16_t> tcp_port;
  std::optional<std::uint16_t> ws_port;
  std::optional<std::string> bind;
  std::string log;
  double duration = 0.0;
};

int cmd_run(const RunArgs& a) {
  opsd::Config config = opsd::load_config(a.config);
  opsd::check_config(config);
  if (a.tcp_port) config.tcp_port = *a.tcp_port;
  if (a.ws_port) config.ws_port = *a.ws_port;
  if (a.bind) config.bind = *a.bind;

  opsd::Runtime runtime(config);
  std::ofstream log;
  if (!a.log.empty()) {
    log = open_out(a.log);
    runtime.set_log(&log);
  }
  bus::TcpServer tcp(runtime.broker(), config.tcp_port, config.bind);
  opsd::Gateway gateway(runtime.broker(), config.ws_port, config.bind, config.console_dir);
  std::cerr << "sociobot: bus tcp://" << config.bind << ":" << tcp.port() << ", console http://"
            << config.bind << ":" << gateway.port() << "/ (seed " << config.world.seed
            << (a.fast ? ", fast" : "") << ")\n";

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto start = std::chrono::steady_clock::now();
  const auto tick = std::chrono::duration<double>(config.world.dt);
  while (!g_stop.load() && (a.duration <= 0.0 || runtime.time() < a.duration)) {
    runtime.step();
    if (!a.fast) {
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      tick * static_cast<double>(runtime.tick())));
    }
  }
  gateway.stop();
  tcp.stop();
  std::cerr << "sociobot: stopped at t=" << runtime.time() << " s\n";
  return 0;
}

// ---------------------------------------------------------------- scenario

struct ScenarioArgs {
  std::string file;
  std::string config;
  std::string log;
  std::string report;
};

opsd::Config scenario_config(const opsd::Scenario& s, const std::string& flag) {
  if (!flag.empty()) {
    return opsd::load_config(flag);
  }
  if (s.config) {
    return opsd::load_config(*s.config);
  }
  throw opsd::ScenarioError("no config: pass -c or set \"config\" in the scenario");
}

int cmd_scenario(const ScenarioArgs& a) {
  const opsd::Scenario scenario = opsd::load_scenario(a.file);
  opsd::ScenarioReport report;
  std::ofstream log;
  opsd::RunOptions options;
  if (!a.log.empty()) {
    log = open_out(a.log);
    options.log = &log;
  }
  if (scenario.publishes.empty() && scenario.asserts.empty() && scenario.duration <= 0.0) {
    report.name = scenario.name;
  } else {
    const opsd::Config config = scenario_config(scenario, a.config);
    opsd::check_config(config);
    report = opsd::run_scenario(scenario, config, options);
  }
  const std::string text = opsd::report_to_json(report).dump(2);
  std::cout << text << '\n';
  if (!a.report.empty()) {
    open_out(a.report) << text << '\n';
  }
  for (const opsd::AssertResult& r : report.asserts) {
    if (!r.passed) {
      std::cerr << "FAILED " << r.name << ": " << r.detail << '\n';
    }
  }
  return report.passed ? 0 : kExitFailed;
}

// ---------------------------------------------------------------- echo / pub / topics / record

struct EchoArgs {
  Endpoint ep;
  std::string pattern;
  int count = 0;
  double timeout = 0.0;
};

int cmd_echo(const EchoArgs& a) {
  bus::BusClient client(a.ep.host, a.ep.port, "sociobot-echo");
  client.subscribe(a.pattern);
  std::signal(SIGINT, on_signal);
  int printed = 0;
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(a.timeout));
  while (!g_stop.load() && (a.count <= 0 || printed < a.count)) {
    if (a.timeout > 0.0 && std::chrono::steady_clock::now() >= deadline) {
      break;
    }
    if (!client.connected()) {
      std::cerr << "sociobot: connection closed\n";
      return kExitFailed;
    }
    if (auto env = client.next(std::chrono::milliseconds(100))) {
      std::cout << bus::dump_envelope(*env) << '\n' << std::flush;
      ++printed;
    }
  }
  return 0;
}

struct PubArgs {
  Endpoint ep;
  std::string topic;
  std::string payload;
  std::string type = "Json";
};

int cmd_pub(const PubArgs& a) {
  json payload;
  try {
    payload = json::parse(a.payload);
  } catch (const json::exception& e) {
    std::cerr << "sociobot: payload is not JSON: " << e.what() << '\n';
    return kExitError;
  }
  bus::BusClient client(a.ep.host, a.ep.port, "sociobot-pub");
  client.publish(a.topic, a.type, std::move(payload));
  // The server handles frames in order, so this ack means the publish landed.
  client.subscribe("/meta/done");
  return 0;
}

int cmd_topics(const Endpoint& ep) {
  bus::BusClient client(ep.host, ep.port, "sociobot-topics");
  bus::Envelope req;
  req.topic = std::string(bus::meta::kTopics);
  client.send(req);
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (std::chrono::steady_clock::now() < deadline) {
    auto env = client.next(std::chrono::milliseconds(200));
    if (env && env->topic == bus::meta::kTopics) {
      for (const json& t : env->payload.at("topics")) {
        std::cout << t.at("topic").get<std::string>() << "  " << t.at("type").get<std::string>()
                  << "  pub=" << t.at("publishers") << " sub=" << t.at("subscribers") << '\n';
      }
      return 0;
    }
  }
  std::cerr << "sociobot: no topic list from daemon\n";
  return kExitFailed;
}

struct RecordArgs {
  Endpoint ep;
  std::string out;
  std::string pattern = "/*";
  double duration = 0.0;
};

// Anonymous log: bare envelopes, one per line. Publisher names are only
// available in logs written by `run --log` or `scenario --log`.
int cmd_record(const RecordArgs& a) {
  std::ofstream out = open_out(a.out);
  bus::BusClient client(a.ep.host, a.ep.port, "sociobot-record");
  client.subscribe(a.pattern);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto start = std::chrono::steady_clock::now();
  std::size_t n = 0;
  while (!g_stop.load() && client.connected()) {
    if (a.duration > 0.0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >=
            a.duration) {
      break;
    }
    if (auto env = client.next(std::chrono::milliseconds(100))) {
      if (env->topic.starts_with("/meta/")) {
        continue;
      }
      out << bus::dump_envelope(*env) << '\n';
      ++n;
    }
  }
  std::cerr << "sociobot: recorded " << n << " envelopes to " << a.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- replay

struct ReplayArgs {
  std::string in;
  std::string config;
  std::string log;
  bool live = false;
  Endpoint ep;
};

int replay_live(const opsd::BusLog& log, const Endpoint& ep) {
  const opsd::Scenario inputs = opsd::scenario_from_log(log);
  bus::BusClient client(ep.host, ep.port, "sociobot-replay");
  std::signal(SIGINT, on_signal);
  const auto start = std::chrono::steady_clock::now();
  const double t0 = inputs.publishes.empty() ? 0.0 : inputs.publishes.front().at;
  for (const opsd::ScenarioPublish& p : inputs.publishes) {
    std::this_thread::sleep_until(start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                              std::chrono::duration<double>(p.at - t0)));
    if (g_stop.load()) {
      break;
    }
    client.publish(p.topic, p.type, p.payload);
  }
  client.subscribe("/meta/done");
  std::cerr << "sociobot: sent " << inputs.publishes.size() << " inputs\n";
  return 0;
}

int cmd_replay(const ReplayArgs& a) {
  const opsd::BusLog log = opsd::load_log(a.in);
  if (a.live) {
    return replay_live(log, a.ep);
  }
  opsd::Config config = opsd::load_config(a.config);
  opsd::check_config(config);
  std::ofstream out;
  if (!a.log.empty()) {
    out = open_out(a.log);
  }
  const opsd::ReplayResult r = opsd::replay_log(log, config, a.log.empty() ? nullptr : &out);
  std::cout << json{{"identical", r.identical},
                    {"inputs", r.inputs},
                    {"expected", r.expected},
                    {"produced", r.produced},
                    {"detail", r.detail}}
                   .dump(2)
            << '\n';
  return r.identical ? 0 : kExitFailed;
}

// ---------------------------------------------------------------- plan-pick

struct PlanArgs {
  std::string config;
  std::string object = "cube";
  std::string arm = "right";
  std::string out;
  std::string name = "pick_lift_place";
};

int cmd_plan_pick(const PlanArgs& a) {
  const opsd::Config config = opsd::load_config(a.config);
  const kin::KinematicTree tree = kin::load_urdf(config.model).tree;
  const sim::Scene scene = sim::load_scene(config.scene);
  const auto arm = sim::parse_arm(a.arm);
  if (!arm) {
    std::cerr << "sociobot: arm must be left or right\n";
    return kExitError;
  }
  const auto it = std::find_if(scene.objects.begin(), scene.objects.end(),
                               [&](const sim::SceneObject& o) { return o.id == a.object; });
  if (it == scene.objects.end()) {
    std::cerr << "sociobot: no object '" << a.object << "' in " << config.scene << '\n';
    return kExitError;
  }
  const std::string& tool = *arm == sim::Arm::kLeft ? config.world.left_tool
                                                     : config.world.right_tool;
  behaviors::MotionClip clip = behaviors::make_pick_place_clip(
      tree, kin::JointVector(tree), *arm, it->pose.position, tool, config.pick);
  clip.name = a.name;
  const std::filesystem::path out =
      a.out.empty() ? config.clip_dir / (a.name + ".json") : std::filesystem::path(a.out);
  behaviors::save_clip(clip, out);
  std::cerr << "sociobot: wrote " << out.string() << " (" << clip.keyframes.size()
            << " keyframes, " << clip.duration() << " s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sociobot: simulated social robot daemon and bus tools"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Boot the simulation, TCP bus and WebSocket gateway");
  run_cmd->add_option("-c,--config", run.config, "Config file")->required();
  run_cmd->add_flag("--fast", run.fast, "Do not pace to wall-clock time");
  run_cmd->add_option("--tcp-port", run.tcp_port, "TCP bus port (default from config, 8765)");
  run_cmd->add_option("--ws-port", run.ws_port, "WebSocket/HTTP port (default from config, 8766)");
  run_cmd->add_option("--bind", run.bind, "Listen address");
  run_cmd->add_option("--log", run.log, "Write a replayable bus log");
  run_cmd->add_option("--duration", run.duration, "Stop after this much sim time (s)");

  ScenarioArgs sc;
  auto* sc_cmd = app.add_subcommand("scenario", "Run a scenario script; exit 0 iff all asserts pass");
  sc_cmd->add_option("file", sc.file, "Scenario JSON")->required();
  sc_cmd->add_option("-c,--config", sc.config, "Config file (overrides the scenario's)");
  sc_cmd->add_option("--log", sc.log, "Write the bus log");
  sc_cmd->add_option("--report", sc.report, "Also write the report here");

  EchoArgs echo;
  auto* echo_cmd = app.add_subcommand("echo", "Print envelopes on a topic or pattern");
  echo_cmd->add_option("topic", echo.pattern, "Topic or pattern (/prefix/*)")->required();
  echo_cmd->add_option("-n,--count", echo.count, "Exit after this many envelopes");
  echo_cmd->add_option("--timeout", echo.timeout, "Exit after this many seconds");
  add_endpoint(echo_cmd, echo.ep);

  PubArgs pub;
  auto* pub_cmd = app.add_subcommand("pub", "Publish one envelope");
  pub_cmd->add_option("topic", pub.topic, "Topic")->required();
  pub_cmd->add_option("json", pub.payload, "Payload JSON")->required();
  pub_cmd->add_option("-t,--type", pub.type, "Payload type name");
  add_endpoint(pub_cmd, pub.ep);

  Endpoint topics_ep;
  auto* topics_cmd = app.add_subcommand("topics", "List topics known to the daemon");
  add_endpoint(topics_cmd, topics_ep);

  RecordArgs rec;
  auto* rec_cmd = app.add_subcommand("record", "Record bus traffic to a log file");
  rec_cmd->add_option("out", rec.out, "Output file")->required();
  rec_cmd->add_option("-p,--pattern", rec.pattern, "Pattern to record");
  rec_cmd->add_option("--duration", rec.duration, "Stop after this many seconds");
  add_endpoint(rec_cmd, rec.ep);

  ReplayArgs rep;
  auto* rep_cmd = app.add_subcommand(
      "replay", "Re-run a log's inputs and compare /joint/state, or resend them live");
  rep_cmd->add_option("in", rep.in, "Log file")->required();
  rep_cmd->add_option("-c,--config", rep.config, "Config file (offline replay)");
  rep_cmd->add_option("--log", rep.log, "Write the regenerated log");
  rep_cmd->add_flag("--live", rep.live, "Publish the inputs to a running daemon instead");
  add_endpoint(rep_cmd, rep.ep);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan-pick", "Plan a pick-lift-place clip with IK");
  plan_cmd->add_option("-c,--config", plan.config, "Config file")->required();
  plan_cmd->add_option("--object", plan.object, "Scene object id");
  plan_cmd->add_option("--arm", plan.arm, "left or right");
  plan_cmd->add_option("--name", plan.name, "Clip name");
  plan_cmd->add_option("-o,--out", plan.out, "Output file (default clip_dir/<name>.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sc_cmd) return cmd_scenario(sc);
    if (*echo_cmd) return cmd_echo(echo);
    if (*pub_cmd) return cmd_pub(pub);
    if (*topics_cmd) return cmd_topics(topics_ep);
    if (*rec_cmd) return cmd_record(rec);
    if (*rep_cmd) {
      if (!rep.live && rep.config.empty()) {
        std::cerr << "sociobot: replay needs -c config (or --live)\n";
        return kExitError;
      }
      return cmd_replay(rep);
    }
    if (*plan_cmd) return cmd_plan_pick(plan);
  } catch (const opsd::ConfigError& e) {
    std::cerr << "sociobot: bad config: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "sociobot: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
