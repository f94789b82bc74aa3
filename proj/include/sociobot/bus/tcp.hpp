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

#ifndef SOCIOBOT_BUS_TCP_HPP_
#define SOCIOBOT_BUS_TCP_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "sociobot/bus/broker.hpp"
#include "sociobot/bus/envelope.hpp"

namespace sociobot::bus {

// Control topics spoken between clients and the server. Replies go only to
// the connection that asked; they never pass through the broker.
//   client -> server: /meta/hello {node_name}       (must be the first frame)
//                     /meta/subscribe {pattern}
//                     /meta/unsubscribe {pattern}
//                     /meta/topics {}
//   server -> client: /meta/welcome {node_name, server}
//                     /meta/subscribed {pattern}, /meta/unsubscribed {pattern}
//                     /meta/topics {topics: [{topic, type, publishers, subscribers}]}
//                     /meta/error {code, message}
// Any other frame is published on the broker, re-stamped with broker time.
namespace meta {
inline constexpr std::string_view kHello = "/meta/hello";
inline constexpr std::string_view kWelcome = "/meta/welcome";
inline constexpr std::string_view kSubscribe = "/meta/subscribe";
inline constexpr std::string_view kSubscribed = "/meta/subscribed";
inline constexpr std::string_view kUnsubscribe = "/meta/unsubscribe";
inline constexpr std::string_view kUnsubscribed = "/meta/unsubscribed";
inline constexpr std::string_view kTopics = "/meta/topics";
inline constexpr std::string_view kError = "/meta/error";
}  // namespace meta

nlohmann::json topics_to_json(const std::vector<TopicInfo>& topics);

// TCP front end of a Broker: one I/O thread, one session per connection,
// each with its own bounded subscription queue.
class TcpServer {
 public:
  // port 0 picks an ephemeral port. Throws BusError(kConnection) if the
  // port cannot be bound.
  TcpServer(Broker& broker, std::uint16_t port, std::string bind_address = "127.0.0.1");
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const;
  std::size_t session_count() const;
  void stop();

 private:
  friend class Session;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocking-API client with a background I/O thread. Incoming envelopes
// (including /meta replies other than subscribe acks) queue in a bounded
// inbox with the same drop-oldest policy as the broker.
class BusClient {
 public:
  // Connects and completes the hello handshake. Throws BusError(kConnection).
  BusClient(const std::string& host, std::uint16_t port, std::string node_name,
            std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~BusClient();
  BusClient(const BusClient&) = delete;
  BusClient& operator=(const BusClient&) = delete;

  void publish(std::string topic, std::string type, nlohmann::json payload);
  void send(const Envelope& env);

  // Blocks until the server acknowledges. Throws kBadPattern on a server
  // error, kConnection on timeout.
  void subscribe(std::string_view pattern,
                 std::chrono::milliseconds timeout = std::chrono::seconds(5));
  void unsubscribe(std::string_view pattern,
                   std::chrono::milliseconds timeout = std::chrono::seconds(5));

  std::optional<Envelope> next(std::chrono::milliseconds timeout);
  bool connected() const;
  void close();

 private:
  struct Impl;
  void await_ack(char sign, std::string_view pattern, std::chrono::milliseconds timeout);

  std::shared_ptr<Impl> impl_;
};

}  // namespace sociobot::bus

#endif  // SOCIOBOT_BUS_TCP_HPP_
