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

// Random JSON values and envelopes for codec property tests.

#ifndef SOCIOBOT_TESTS_ORACLES_RANDOM_JSON_HPP_
#define SOCIOBOT_TESTS_ORACLES_RANDOM_JSON_HPP_

#include <random>
#include <string>

#include <json.hpp>

#include "sociobot/bus/envelope.hpp"

namespace sociobot::testing {

inline std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  static const char* const kPieces[] = {"a", "Z", "0", " ", "\"", "\\", "/", "\n", "\t",
                                        "\x01", "\xc3\xa9", "\xe2\x82\xac", "\xf0\x9f\x98\x80"};
  std::string out;
  const std::size_t n = rng() % (max_len + 1);
  for (std::size_t i = 0; i < n; ++i) {
    out += kPieces[rng() % std::size(kPieces)];
  }
  return out;
}

inline double random_double(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0:
      return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    case 1:
      return std::uniform_real_distribution<double>(-1e300, 1e300)(rng);
    case 2:
      return std::ldexp(std::uniform_real_distribution<double>(0.5, 1.0)(rng),
                        static_cast<int>(rng() % 2000) - 1000);
    default:
      return static_cast<double>(static_cast<std::int64_t>(rng() % 2000) - 1000);
  }
}

inline nlohmann::json random_json(std::mt19937_64& rng, int depth) {
  const int kind = static_cast<int>(rng() % (depth > 0 ? 9 : 7));
  switch (kind) {
    case 0:
      return nullptr;
    case 1:
      return rng() % 2 == 0;
    case 2:
      return static_cast<std::int64_t>(rng());
    case 3:
      return rng();
    case 4:
      return random_double(rng);
    case 5:
    case 6:
      return random_text(rng, 12);
    case 7: {
      nlohmann::json a = nlohmann::json::array();
      for (std::size_t i = rng() % 5; i > 0; --i) a.push_back(random_json(rng, depth - 1));
      return a;
    }
    default: {
      nlohmann::json o = nlohmann::json::object();
      for (std::size_t i = rng() % 5; i > 0; --i) o[random_text(rng, 6)] = random_json(rng, depth - 1);
      return o;
    }
  }
}

inline std::string random_topic(std::mt19937_64& rng) {
  static const char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789_";
  std::string topic;
  for (std::size_t level = 1 + rng() % 3; level > 0; --level) {
    topic += '/';
    for (std::size_t i = 1 + rng() % 8; i > 0; --i) {
      topic += kAlphabet[rng() % (sizeof(kAlphabet) - 1)];
    }
  }
  return topic;
}

inline bus::Envelope random_envelope(std::mt19937_64& rng) {
  bus::Envelope env;
  env.topic = random_topic(rng);
  env.seq = rng();
  env.stamp = random_double(rng);
  env.type = random_text(rng, 10);
  env.payload = random_json(rng, 3);
  return env;
}

}  // namespace sociobot::testing

#endif  // SOCIOBOT_TESTS_ORACLES_RANDOM_JSON_HPP_
