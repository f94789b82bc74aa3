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

#ifndef SOCIOBOT_BUS_BROKER_HPP_
#define SOCIOBOT_BUS_BROKER_HPP_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sociobot/bus/envelope.hpp"

namespace sociobot::bus {

inline constexpr std::size_t kDefaultQueueDepth = 256;

// Bounded FIFO of envelopes for one consumer. When full, the oldest entry
// is dropped to make room.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity = kDefaultQueueDepth);

  std::optional<Envelope> try_pop();
  std::optional<Envelope> pop_for(std::chrono::milliseconds timeout);
  std::vector<Envelope> drain();

  std::size_t size() const;
  std::uint64_t dropped() const;
  std::size_t capacity() const { return capacity_; }

  std::vector<std::string> patterns() const;
  bool matches(std::string_view topic) const;

  // Called after every delivery, on the publishing thread, without locks
  // held. It must not block.
  void set_notify(std::function<void()> notify);

 private:
  friend class Broker;
  void add_pattern(std::string pattern);
  bool remove_pattern(std::string_view pattern);
  void deliver(const Envelope& env);

  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<Envelope> queue_;
  std::uint64_t dropped_ = 0;
  std::vector<std::string> patterns_;
  std::function<void()> notify_;
};

struct TopicInfo {
  std::string topic;
  std::string type;
  std::size_t publishers = 0;
  std::size_t subscribers = 0;
};

// In-process topic broker. Thread-safe; publishes are serialized so every
// subscriber sees one global order per topic.
class Broker {
 public:
  using Clock = std::function<double()>;
  // Sees every stamped envelope with its publisher, in global publish
  // order, under the broker lock. Must not publish or block.
  using Tap = std::function<void(const Envelope&, std::string_view publisher)>;
  // Runs before stamping, outside the lock. Returning true takes the
  // envelope over: it is neither stamped nor delivered.
  using Intercept = std::function<bool(const Envelope&, std::string_view publisher)>;

  Broker() = default;

  // Stamps seq (1, 2, ... per topic) and delivers to matching subscribers.
  // The envelope's own stamp is kept. Returns the stamped envelope.
  Envelope publish(Envelope env, std::string_view publisher = {});

  // Throws BusError(kBadPattern).
  std::shared_ptr<Subscription> subscribe(std::string_view pattern,
                                          std::size_t capacity = kDefaultQueueDepth);
  void add_pattern(const std::shared_ptr<Subscription>& sub, std::string_view pattern);
  bool remove_pattern(const std::shared_ptr<Subscription>& sub, std::string_view pattern);
  void unsubscribe(const std::shared_ptr<Subscription>& sub);

  std::vector<TopicInfo> topics() const;

  // Time source used to stamp envelopes that arrive from the network.
  void set_clock(Clock clock);
  double now() const;

  void set_tap(Tap tap);
  void set_intercept(Intercept intercept);

 private:
  struct TopicState {
    std::uint64_t seq = 0;
    std::string type;
    std::set<std::string> publishers;
  };

  mutable std::mutex mutex_;
  std::map<std::string, TopicState, std::less<>> topics_;
  std::vector<std::shared_ptr<Subscription>> subscriptions_;
  Clock clock_;
  Tap tap_;
  Intercept intercept_;
};

}  // namespace sociobot::bus

#endif  // SOCIOBOT_BUS_BROKER_HPP_
