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

#ifndef SOCIOBOT_BUS_ENVELOPE_HPP_
#define SOCIOBOT_BUS_ENVELOPE_HPP_

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace sociobot::bus {

enum class BusErrc {
  kFrameTooLarge,
  kBadJson,
  kBadTopic,
  kBadPattern,
  kProtocol,
  kConnection,
};

std::string_view to_string(BusErrc code);

class BusError : public std::runtime_error {
 public:
  BusError(BusErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  BusErrc code() const noexcept { return code_; }

 private:
  BusErrc code_;
};

struct Envelope {
  std::string topic;
  std::uint64_t seq = 0;  // per topic, assigned by the broker
  double stamp = 0.0;     // sim time, s
  std::string type;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const Envelope&) const = default;
};

// ^(/[a-z0-9_]+)+$
bool valid_topic(std::string_view topic);
// A topic, or a prefix ending in "/*" ("/*" alone matches everything).
bool valid_pattern(std::string_view pattern);
bool pattern_matches(std::string_view pattern, std::string_view topic);

// {"payload", "seq", "stamp", "topic", "type"}; keys serialize sorted.
nlohmann::json to_json(const Envelope& env);
// Throws BusError(kBadJson) for a malformed object, kBadTopic for a bad topic.
Envelope envelope_from_json(const nlohmann::json& j);
Envelope parse_envelope(std::string_view text);
std::string dump_envelope(const Envelope& env);

inline constexpr std::size_t kMaxFrameBytes = std::size_t{16} << 20;
inline constexpr std::size_t kFrameHeaderBytes = 4;

// 4-byte big-endian body length, then the UTF-8 JSON body.
std::string encode_frame(const Envelope& env);
// `bytes` must hold exactly one complete frame.
Envelope decode_frame(std::string_view bytes);

std::uint32_t read_be32(const unsigned char* p);

// Incremental decoder for a byte stream. Incomplete frames stay buffered;
// an oversized length prefix throws kFrameTooLarge as soon as it is seen.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  std::optional<Envelope> next();
  std::size_t buffered() const { return buffer_.size() - offset_; }

 private:
  std::string buffer_;
  std::size_t offset_ = 0;
};

}  // namespace sociobot::bus

#endif  // SOCIOBOT_BUS_ENVELOPE_HPP_
