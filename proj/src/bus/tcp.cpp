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

#include "sociobot/bus/tcp.hpp"

#include <array>
#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>

namespace sociobot::bus {

namespace asio = boost::asio;
using asio::ip::tcp;
using nlohmann::json;

json topics_to_json(const std::vector<TopicInfo>& topics) {
  json list = json::array();
  for (const TopicInfo& t : topics) {
    list.push_back({{"topic", t.topic},
                    {"type", t.type},
                    {"publishers", t.publishers},
                    {"subscribers", t.subscribers}});
  }
  return list;
}

namespace {

Envelope control(std::string_view topic, json payload) {
  Envelope env;
  env.topic = std::string(topic);
  env.type = "Meta";
  env.payload = std::move(payload);
  return env;
}

Envelope error_envelope(BusErrc code, const std::string& message) {
  return control(meta::kError, {{"code", to_string(code)}, {"message", message}});
}

}  // namespace

// ---------------------------------------------------------------- server

class Session;

struct TcpServer::Impl {
  Impl(Broker& b, std::uint16_t port, const std::string& address)
      : broker(b), acceptor(io) {
    boost::system::error_code ec;
    const tcp::endpoint endpoint(asio::ip::make_address(address, ec), port);
    if (ec) {
      throw BusError(BusErrc::kConnection, "bad bind address " + address);
    }
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
    if (!ec) acceptor.bind(endpoint, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw BusError(BusErrc::kConnection,
                     "cannot listen on " + address + ":" + std::to_string(port) + ": " +
                         ec.message());
    }
    bound_port = acceptor.local_endpoint().port();
  }

  void accept();
  void forget(const std::shared_ptr<Session>& s) {
    std::lock_guard lock(sessions_mutex);
    sessions.erase(s);
  }

  Broker& broker;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::uint16_t bound_port = 0;
  std::thread thread;
  mutable std::mutex sessions_mutex;
  std::set<std::shared_ptr<Session>> sessions;
  bool stopped = false;
};

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, TcpServer::Impl& owner)
      : socket_(std::move(socket)), owner_(owner), broker_(owner.broker) {}

  void start() { read_header(); }

  // Only after the I/O thread has stopped, or on it.
  void close() {
    if (closed_) {
      return;
    }
    closed_ = true;
    boost::system::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
    if (sub_) {
      broker_.unsubscribe(sub_);
    }
    owner_.forget(shared_from_this());
  }

 private:
  void read_header() {
    asio::async_read(socket_, asio::buffer(header_),
                     [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                       if (ec) {
                         self->close();
                         return;
                       }
                       const std::uint32_t n = read_be32(self->header_.data());
                       if (n > kMaxFrameBytes) {
                         // The stream cannot be resynchronized after this.
                         self->queue(error_envelope(BusErrc::kFrameTooLarge,
                                                    "frame length " + std::to_string(n) +
                                                        " exceeds 16 MiB"));
                         self->close_when_flushed_ = true;
                         self->pump();
                         return;
                       }
                       self->body_.resize(n);
                       self->read_body();
                     });
  }

  void read_body() {
    asio::async_read(socket_, asio::buffer(body_),
                     [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                       if (ec) {
                         self->close();
                         return;
                       }
                       self->handle(self->body_);
                       if (!self->closed_ && !self->close_when_flushed_) {
                         self->read_header();
                       }
                     });
  }

  void handle(const std::string& body) {
    Envelope env;
    try {
      env = parse_envelope(body);
    } catch (const BusError& e) {
      queue(error_envelope(e.code(), e.what()));
      if (!greeted_) {
        close_when_flushed_ = true;
        pump();
      }
      return;
    }
    if (!greeted_) {
      const bool hello = env.topic == meta::kHello && env.payload.is_object() &&
                         env.payload.contains("node_name") && env.payload["node_name"].is_string();
      if (!hello) {
        queue(error_envelope(BusErrc::kProtocol, "first frame must be /meta/hello {node_name}"));
        close_when_flushed_ = true;
        pump();
        return;
      }
      greeted_ = true;
      node_name_ = env.payload["node_name"].get<std::string>();
      sub_ = broker_.subscribe("");
      std::weak_ptr<Session> weak = shared_from_this();
      asio::io_context& io = owner_.io;
      sub_->set_notify([weak, &io, flag = pump_posted_] {
        if (!flag->exchange(true)) {
          asio::post(io, [weak] {
            if (auto s = weak.lock()) {
              s->pump_posted_->store(false);
              s->pump();
            }
          });
        }
      });
      queue(control(meta::kWelcome, {{"node_name", node_name_}, {"server", "sociobot"}}));
      return;
    }
    if (env.topic == meta::kSubscribe || env.topic == meta::kUnsubscribe) {
      const std::string pattern = env.payload.is_object() ? env.payload.value("pattern", "") : "";
      try {
        if (env.topic == meta::kSubscribe) {
          broker_.add_pattern(sub_, pattern);
          queue(control(meta::kSubscribed, {{"pattern", pattern}}));
        } else {
          broker_.remove_pattern(sub_, pattern);
          queue(control(meta::kUnsubscribed, {{"pattern", pattern}}));
        }
      } catch (const BusError& e) {
        queue(error_envelope(e.code(), e.what()));
      }
      return;
    }
    if (env.topic == meta::kTopics) {
      queue(control(meta::kTopics, {{"topics", topics_to_json(broker_.topics())}}));
      return;
    }
    if (env.topic.starts_with("/meta/")) {
      queue(error_envelope(BusErrc::kProtocol, "unknown control topic " + env.topic));
      return;
    }
    env.stamp = broker_.now();
    broker_.publish(std::move(env), node_name_);
  }

  void queue(const Envelope& env) {
    control_out_.push_back(encode_frame(env));
    pump();
  }

  void pump() {
    if (writing_ || closed_) {
      return;
    }
    if (!control_out_.empty()) {
      current_ = std::move(control_out_.front());
      control_out_.pop_front();
    } else {
      std::optional<Envelope> next;
      while (sub_ && (next = sub_->try_pop())) {
        try {
          current_ = encode_frame(*next);
          break;
        } catch (const BusError&) {
          next.reset();  // oversized payload: drop it for this consumer
        }
      }
      if (!next) {
        if (close_when_flushed_) {
          close();
        }
        return;
      }
    }
    writing_ = true;
    asio::async_write(socket_, asio::buffer(current_),
                      [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                        self->writing_ = false;
                        if (ec) {
                          self->close();
                          return;
                        }
                        self->pump();
                      });
  }

  tcp::socket socket_;
  TcpServer::Impl& owner_;
  Broker& broker_;
  std::array<unsigned char, kFrameHeaderBytes> header_{};
  std::string body_;
  bool greeted_ = false;
  bool closed_ = false;
  bool close_when_flushed_ = false;
  bool writing_ = false;
  std::string node_name_;
  std::shared_ptr<Subscription> sub_;
  std::deque<std::string> control_out_;
  std::string current_;
  std::shared_ptr<std::atomic<bool>> pump_posted_ = std::make_shared<std::atomic<bool>>(false);
};

void TcpServer::Impl::accept() {
  acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) {
      return;  // acceptor closed
    }
    boost::system::error_code ignored;
    socket.set_option(tcp::no_delay(true), ignored);
    auto session = std::make_shared<Session>(std::move(socket), *this);
    {
      std::lock_guard lock(sessions_mutex);
      sessions.insert(session);
    }
    session->start();
    accept();
  });
}

TcpServer::TcpServer(Broker& broker, std::uint16_t port, std::string bind_address)
    : impl_(std::make_unique<Impl>(broker, port, bind_address)) {
  impl_->accept();
  impl_->thread = std::thread([impl = impl_.get()] { impl->io.run(); });
}

TcpServer::~TcpServer() { stop(); }

std::uint16_t TcpServer::port() const { return impl_->bound_port; }

std::size_t TcpServer::session_count() const {
  std::lock_guard lock(impl_->sessions_mutex);
  return impl_->sessions.size();
}

void TcpServer::stop() {
  if (impl_->stopped) {
    return;
  }
  impl_->stopped = true;
  impl_->io.stop();
  if (impl_->thread.joinable()) {
    impl_->thread.join();
  }
  boost::system::error_code ec;
  impl_->acceptor.close(ec);
  std::set<std::shared_ptr<Session>> sessions;
  {
    std::lock_guard lock(impl_->sessions_mutex);
    sessions = impl_->sessions;
  }
  for (const auto& s : sessions) {
    s->close();
  }
}

// ---------------------------------------------------------------- client

struct BusClient::Impl : std::enable_shared_from_this<BusClient::Impl> {
  asio::io_context io;
  tcp::socket socket{io};
  std::thread thread;

  std::mutex mutex;
  std::condition_variable changed;
  std::deque<Envelope> inbox;
  std::multiset<std::string> acks;  // "+pattern" / "-pattern"
  std::optional<std::string> last_error;
  bool welcomed = false;
  bool connected = false;
  std::uint64_t dropped = 0;

  // I/O thread only.
  std::array<unsigned char, kFrameHeaderBytes> header{};
  std::string body;
  std::deque<std::string> outbox;
  bool writing = false;
  bool closing = false;

  void read_header() {
    asio::async_read(socket, asio::buffer(header),
                     [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                       if (ec) {
                         self->shutdown();
                         return;
                       }
                       const std::uint32_t n = read_be32(self->header.data());
                       if (n > kMaxFrameBytes) {
                         self->shutdown();
                         return;
                       }
                       self->body.resize(n);
                       self->read_body();
                     });
  }

  void read_body() {
    asio::async_read(socket, asio::buffer(body),
                     [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                       if (ec) {
                         self->shutdown();
                         return;
                       }
                       self->on_frame();
                       self->read_header();
                     });
  }

  void on_frame() {
    Envelope env;
    try {
      env = parse_envelope(body);
    } catch (const BusError&) {
      return;
    }
    std::lock_guard lock(mutex);
    if (env.topic == meta::kWelcome) {
      welcomed = true;
    } else if (env.topic == meta::kSubscribed || env.topic == meta::kUnsubscribed) {
      const char sign = env.topic == meta::kSubscribed ? '+' : '-';
      acks.insert(sign + env.payload.value("pattern", ""));
    } else {
      if (env.topic == meta::kError) {
        last_error = env.payload.value("message", "error");
      }
      if (inbox.size() >= kDefaultQueueDepth) {
        inbox.pop_front();
        ++dropped;
      }
      inbox.push_back(std::move(env));
    }
    changed.notify_all();
  }

  void enqueue(std::string frame) {
    asio::post(io, [self = shared_from_this(), frame = std::move(frame)]() mutable {
      self->outbox.push_back(std::move(frame));
      self->pump();
    });
  }

  void pump() {
    if (writing || !socket.is_open()) {
      return;
    }
    if (outbox.empty()) {
      if (closing) {
        shutdown();
      }
      return;
    }
    writing = true;
    asio::async_write(socket, asio::buffer(outbox.front()),
                      [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                        self->writing = false;
                        self->outbox.pop_front();
                        if (ec) {
                          self->shutdown();
                          return;
                        }
                        self->pump();
                      });
  }

  void shutdown() {
    boost::system::error_code ec;
    socket.shutdown(tcp::socket::shutdown_both, ec);
    socket.close(ec);
    std::lock_guard lock(mutex);
    connected = false;
    changed.notify_all();
  }
};

BusClient::BusClient(const std::string& host, std::uint16_t port, std::string node_name,
                     std::chrono::milliseconds timeout)
    : impl_(std::make_shared<Impl>()) {
  boost::system::error_code ec;
  tcp::resolver resolver(impl_->io);
  const auto endpoints = resolver.resolve(host, std::to_string(port), ec);
  if (!ec) {
    asio::connect(impl_->socket, endpoints, ec);
  }
  if (ec) {
    throw BusError(BusErrc::kConnection,
                   "cannot connect to " + host + ":" + std::to_string(port) + ": " + ec.message());
  }
  impl_->socket.set_option(tcp::no_delay(true), ec);
  impl_->connected = true;
  impl_->read_header();
  impl_->thread = std::thread([impl = impl_] { impl->io.run(); });
  send(control(meta::kHello, {{"node_name", std::move(node_name)}}));
  std::unique_lock lock(impl_->mutex);
  if (!impl_->changed.wait_for(lock, timeout,
                               [&] { return impl_->welcomed || !impl_->connected; }) ||
      !impl_->welcomed) {
    lock.unlock();
    close();
    throw BusError(BusErrc::kConnection, "no welcome from server");
  }
}

BusClient::~BusClient() { close(); }

void BusClient::send(const Envelope& env) {
  impl_->enqueue(encode_frame(env));
}

void BusClient::publish(std::string topic, std::string type, nlohmann::json payload) {
  Envelope env;
  env.topic = std::move(topic);
  env.type = std::move(type);
  env.payload = std::move(payload);
  send(env);
}

void BusClient::subscribe(std::string_view pattern, std::chrono::milliseconds timeout) {
  if (!valid_pattern(pattern)) {
    throw BusError(BusErrc::kBadPattern, "bad pattern '" + std::string(pattern) + "'");
  }
  send(control(meta::kSubscribe, {{"pattern", std::string(pattern)}}));
  await_ack('+', pattern, timeout);
}

void BusClient::unsubscribe(std::string_view pattern, std::chrono::milliseconds timeout) {
  send(control(meta::kUnsubscribe, {{"pattern", std::string(pattern)}}));
  await_ack('-', pattern, timeout);
}

void BusClient::await_ack(char sign, std::string_view pattern, std::chrono::milliseconds timeout) {
  Impl& impl = *impl_;
  const std::string key = sign + std::string(pattern);
  std::unique_lock lock(impl.mutex);
  const bool ok = impl.changed.wait_for(lock, timeout, [&] {
    return impl.acks.count(key) > 0 || !impl.connected;
  });
  if (!ok || impl.acks.count(key) == 0) {
    throw BusError(BusErrc::kConnection, "no acknowledgement for " + key);
  }
  impl.acks.erase(impl.acks.find(key));
}

std::optional<Envelope> BusClient::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mutex);
  if (!impl_->changed.wait_for(lock, timeout,
                               [&] { return !impl_->inbox.empty() || !impl_->connected; }) ||
      impl_->inbox.empty()) {
    return std::nullopt;
  }
  Envelope env = std::move(impl_->inbox.front());
  impl_->inbox.pop_front();
  return env;
}

bool BusClient::connected() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->connected;
}

void BusClient::close() {
  if (!impl_ || !impl_->thread.joinable()) {
    return;
  }
  asio::post(impl_->io, [impl = impl_] {
    impl->closing = true;
    impl->pump();
  });
  {
    std::unique_lock lock(impl_->mutex);
    impl_->changed.wait_for(lock, std::chrono::seconds(2), [&] { return !impl_->connected; });
  }
  impl_->io.stop();
  impl_->thread.join();
  // Run the cancelled handlers so they release their references to impl_.
  boost::system::error_code ec;
  impl_->socket.close(ec);
  impl_->io.restart();
  impl_->io.run();
}

}  // namespace sociobot::bus
