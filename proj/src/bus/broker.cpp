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

#include "sociobot/bus/broker.hpp"

#include <algorithm>

namespace sociobot::bus {

Subscription::Subscription(std::size_t capacity) : capacity_(std::max<std::size_t>(1, capacity)) {}

std::optional<Envelope> Subscription::try_pop() {
  std::lock_guard lock(mutex_);
  if (queue_.empty()) {
    return std::nullopt;
  }
  Envelope env = std::move(queue_.front());
  queue_.pop_front();
  return env;
}

std::optional<Envelope> Subscription::pop_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  if (!ready_.wait_for(lock, timeout, [&] { return !queue_.empty(); })) {
    return std::nullopt;
  }
  Envelope env = std::move(queue_.front());
  queue_.pop_front();
  return env;
}

std::vector<Envelope> Subscription::drain() {
  std::lock_guard lock(mutex_);
  std::vector<Envelope> out(std::make_move_iterator(queue_.begin()),
                            std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

std::size_t Subscription::size() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::uint64_t Subscription::dropped() const {
  std::lock_guard lock(mutex_);
  return dropped_;
}

std::vector<std::string> Subscription::patterns() const {
  std::lock_guard lock(mutex_);
  return patterns_;
}

bool Subscription::matches(std::string_view topic) const {
  std::lock_guard lock(mutex_);
  return std::any_of(patterns_.begin(), patterns_.end(),
                     [&](const std::string& p) { return pattern_matches(p, topic); });
}

void Subscription::set_notify(std::function<void()> notify) {
  std::lock_guard lock(mutex_);
  notify_ = std::move(notify);
}

void Subscription::add_pattern(std::string pattern) {
  std::lock_guard lock(mutex_);
  if (std::find(patterns_.begin(), patterns_.end(), pattern) == patterns_.end()) {
    patterns_.push_back(std::move(pattern));
  }
}

bool Subscription::remove_pattern(std::string_view pattern) {
  std::lock_guard lock(mutex_);
  const auto it = std::find(patterns_.begin(), patterns_.end(), pattern);
  if (it == patterns_.end()) {
    return false;
  }
  patterns_.erase(it);
  return true;
}

void Subscription::deliver(const Envelope& env) {
  std::function<void()> notify;
  {
    std::lock_guard lock(mutex_);
    if (queue_.size() >= capacity_) {
      queue_.pop_front();
      ++dropped_;
    }
    queue_.push_back(env);
    notify = notify_;
  }
  ready_.notify_one();
  if (notify) {
    notify();
  }
}

Envelope Broker::publish(Envelope env, std::string_view publisher) {
  if (!valid_topic(env.topic)) {
    throw BusError(BusErrc::kBadTopic, "bad topic '" + env.topic + "'");
  }
  Intercept intercept;
  {
    std::lock_guard lock(mutex_);
    intercept = intercept_;
  }
  if (intercept && intercept(env, publisher)) {
    return env;
  }
  std::lock_guard lock(mutex_);
  auto it = topics_.find(env.topic);
  if (it == topics_.end()) {
    it = topics_.emplace(env.topic, TopicState{}).first;
  }
  TopicState& state = it->second;
  env.seq = ++state.seq;
  if (!env.type.empty()) {
    state.type = env.type;
  }
  if (!publisher.empty()) {
    state.publishers.emplace(publisher);
  }
  if (tap_) {
    tap_(env, publisher);
  }
  for (const auto& sub : subscriptions_) {
    if (sub->matches(env.topic)) {
      sub->deliver(env);
    }
  }
  return env;
}

void Broker::set_tap(Tap tap) {
  std::lock_guard lock(mutex_);
  tap_ = std::move(tap);
}

void Broker::set_intercept(Intercept intercept) {
  std::lock_guard lock(mutex_);
  intercept_ = std::move(intercept);
}

std::shared_ptr<Subscription> Broker::subscribe(std::string_view pattern, std::size_t capacity) {
  auto sub = std::make_shared<Subscription>(capacity);
  if (!pattern.empty()) {
    add_pattern(sub, pattern);
  }
  std::lock_guard lock(mutex_);
  subscriptions_.push_back(sub);
  return sub;
}

void Broker::add_pattern(const std::shared_ptr<Subscription>& sub, std::string_view pattern) {
  if (!valid_pattern(pattern)) {
    throw BusError(BusErrc::kBadPattern, "bad pattern '" + std::string(pattern) + "'");
  }
  std::lock_guard lock(mutex_);
  sub->add_pattern(std::string(pattern));
}

bool Broker::remove_pattern(const std::shared_ptr<Subscription>& sub, std::string_view pattern) {
  std::lock_guard lock(mutex_);
  return sub->remove_pattern(pattern);
}

void Broker::unsubscribe(const std::shared_ptr<Subscription>& sub) {
  std::lock_guard lock(mutex_);
  std::erase(subscriptions_, sub);
}

std::vector<TopicInfo> Broker::topics() const {
  std::lock_guard lock(mutex_);
  std::vector<TopicInfo> out;
  for (const auto& [topic, state] : topics_) {
    TopicInfo info{topic, state.type, state.publishers.size(), 0};
    for (const auto& sub : subscriptions_) {
      info.subscribers += sub->matches(topic) ? 1 : 0;
    }
    out.push_back(std::move(info));
  }
  return out;
}

void Broker::set_clock(Clock clock) {
  std::lock_guard lock(mutex_);
  clock_ = std::move(clock);
}

double Broker::now() const {
  std::lock_guard lock(mutex_);
  return clock_ ? clock_() : 0.0;
}

}  // namespace sociobot::bus
