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

#ifndef SOCIOBOT_OPSD_REPLAY_HPP_
#define SOCIOBOT_OPSD_REPLAY_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sociobot/bus/envelope.hpp"
#include "sociobot/opsd/config.hpp"
#include "sociobot/opsd/scenario.hpp"

namespace sociobot::opsd {

struct LogRecord {
  std::string publisher;  // empty when unknown
  bus::Envelope envelope;
};

struct BusLog {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::vector<LogRecord> records;
};

// Reads the JSON-lines format written by Runtime::set_log. Lines that are
// bare envelopes (as written by `sociobot record`) are accepted with an
// empty publisher. Throws ScenarioError with the line number.
BusLog read_log(std::istream& in);
BusLog load_log(const std::filesystem::path& path);

// True for envelopes that came from outside the runtime: anything not
// published by the sim or a behavior node. Without a publisher (logs taken
// over TCP), operator-only topics count, plus set_* world commands.
bool is_input(const LogRecord& record);

// The log's inputs as publishes at their original stamps; duration is the
// stamp of the last /joint/state.
Scenario scenario_from_log(const BusLog& log);

struct ReplayResult {
  bool identical = false;
  std::size_t expected = 0;   // /joint/state envelopes in the log
  std::size_t produced = 0;
  std::size_t inputs = 0;
  std::string detail;         // first difference
};

// Re-runs the inputs through a fresh runtime (seed from the log header
// when present) and compares the /joint/state stream byte for byte.
ReplayResult replay_log(const BusLog& log, Config config, std::ostream* out_log = nullptr);

}  // namespace sociobot::opsd

#endif  // SOCIOBOT_OPSD_REPLAY_HPP_
