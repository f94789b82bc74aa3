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

#include "sociobot/bus/envelope.hpp"

#include <cmath>

namespace sociobot::bus {

using nlohmann::json;

std::string_view to_string(BusErrc code) {
  switch (code) {
    case BusErrc::kFrameTooLarge:
      return "FrameTooLarge";
    case BusErrc::kBadJson:
      return "BadJson";
    case BusErrc::kBadTopic:
      return "BadTopic";
    case BusErrc::kBadPattern:
      return "BadPattern";
    case BusErrc::kProtocol:
      return "Protocol";
    case BusErrc::kConnection:
      return "Connection";
  }
  return "?";
}

bool valid_topic(std::string_view topic) {
  if (topic.size() < 2 || topic.front() != '/' || topic.back() == '/') {
    return false;
  }
  char prev = '\0';
  for (char c : topic) {
    const bool word = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!word && c != '/') {
      return false;
    }
    if (c == '/' && prev == '/') {
      return false;
    }
    prev = c;
  }
  return true;
}

bool valid_pattern(std::string_view pattern) {
  if (pattern == "/*") {
    return true;
  }
  if (pattern.size() > 2 && pattern.ends_with("/*")) {
    return valid_topic(pattern.substr(0, pattern.size() - 2));
  }
  return valid_topic(pattern);
}

bool pattern_matches(std::string_view pattern, std::string_view topic) {
  if (pattern.ends_with("/*")) {
    return topic.starts_with(pattern.substr(0, pattern.size() - 1));
  }
  return pattern == topic;
}

json to_json(const Envelope& env) {
  return {{"topic", env.topic},
          {"seq", env.seq},
          {"stamp", env.stamp},
          {"type", env.type},
          {"payload", env.payload}};
}

Envelope envelope_from_json(const json& j) {
  if (!j.is_object()) {
    throw BusError(BusErrc::kBadJson, "envelope must be a JSON object");
  }
  Envelope env;
  const auto topic = j.find("topic");
  if (topic == j.end() || !topic->is_string()) {
    throw BusError(BusErrc::kBadJson, "envelope needs a string 'topic'");
  }
  env.topic = topic->get<std::string>();
  if (!valid_topic(env.topic)) {
    throw BusError(BusErrc::kBadTopic, "bad topic '" + env.topic + "'");
  }
  if (const auto seq = j.find("seq"); seq != j.end()) {
    if (!seq->is_number_unsigned() && !(seq->is_number_integer() && seq->get<std::int64_t>() >= 0)) {
      throw BusError(BusErrc::kBadJson, "'seq' must be an unsigned integer");
    }
    env.seq = seq->get<std::uint64_t>();
  }
  if (const auto stamp = j.find("stamp"); stamp != j.end()) {
    if (!stamp->is_number() || !std::isfinite(stamp->get<double>())) {
      throw BusError(BusErrc::kBadJson, "'stamp' must be a finite number");
    }
    env.stamp = stamp->get<double>();
  }
  if (const auto type = j.find("type"); type != j.end()) {
    if (!type->is_string()) {
      throw BusError(BusErrc::kBadJson, "'type' must be a string");
    }
    env.type = type->get<std::string>();
  }
  if (const auto payload = j.find("payload"); payload != j.end()) {
    env.payload = *payload;
  }
  return env;
}

Envelope parse_envelope(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw BusError(BusErrc::kBadJson, e.what());
  }
  return envelope_from_json(j);
}

std::string dump_envelope(const Envelope& env) {
  // Replace invalid UTF-8 instead of throwing: payloads may come from anywhere.
  return to_json(env).dump(-1, ' ', false, json::error_handler_t::replace);
}

std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

std::string encode_frame(const Envelope& env) {
  if (!valid_topic(env.topic)) {
    throw BusError(BusErrc::kBadTopic, "bad topic '" + env.topic + "'");
  }
  const std::string body = dump_envelope(env);
  if (body.size() > kMaxFrameBytes) {
    throw BusError(BusErrc::kFrameTooLarge,
                   "frame body of " + std::to_string(body.size()) + " bytes exceeds 16 MiB");
  }
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string frame;
  frame.reserve(kFrameHeaderBytes + body.size());
  frame.push_back(static_cast<char>(n >> 24));
  frame.push_back(static_cast<char>(n >> 16));
  frame.push_back(static_cast<char>(n >> 8));
  frame.push_back(static_cast<char>(n));
  frame += body;
  return frame;
}

Envelope decode_frame(std::string_view bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    throw BusError(BusErrc::kBadJson, "truncated frame header");
  }
  const std::uint32_t n = read_be32(reinterpret_cast<const unsigned char*>(bytes.data()));
  if (n > kMaxFrameBytes) {
    throw BusError(BusErrc::kFrameTooLarge, "frame length " + std::to_string(n) + " exceeds 16 MiB");
  }
  if (bytes.size() - kFrameHeaderBytes != n) {
    throw BusError(BusErrc::kBadJson, "frame length does not match body");
  }
  return parse_envelope(bytes.substr(kFrameHeaderBytes));
}

void FrameDecoder::feed(std::string_view bytes) {
  if (offset_ > 0 && offset_ == buffer_.size()) {
    buffer_.clear();
    offset_ = 0;
  }
  buffer_.append(bytes);
}

std::optional<Envelope> FrameDecoder::next() {
  if (buffered() < kFrameHeaderBytes) {
    return std::nullopt;
  }
  const std::uint32_t n =
      read_be32(reinterpret_cast<const unsigned char*>(buffer_.data() + offset_));
  if (n > kMaxFrameBytes) {
    throw BusError(BusErrc::kFrameTooLarge, "frame length " + std::to_string(n) + " exceeds 16 MiB");
  }
  if (buffered() < kFrameHeaderBytes + n) {
    return std::nullopt;
  }
  const std::string_view body(buffer_.data() + offset_ + kFrameHeaderBytes, n);
  offset_ += kFrameHeaderBytes + n;
  Envelope env = parse_envelope(body);
  if (offset_ > 65536 && offset_ * 2 > buffer_.size()) {
    buffer_.erase(0, offset_);
    offset_ = 0;
  }
  return env;
}

}  // namespace sociobot::bus
