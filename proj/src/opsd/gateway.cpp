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

#include "sociobot/opsd/gateway.hpp"

#include <atomic>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "sociobot/bus/envelope.hpp"
#include "sociobot/bus/tcp.hpp"

namespace sociobot::opsd {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using nlohmann::json;

std::string_view content_type(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  if (ext == ".txt") return "text/plain; charset=utf-8";
  return "application/octet-stream";
}

std::filesystem::path resolve_static(const std::filesystem::path& root, std::string_view target) {
  if (root.empty() || target.empty() || target.front() != '/') {
    return {};
  }
  target = target.substr(0, target.find_first_of("?#"));
  std::filesystem::path rel;
  std::size_t pos = 1;
  while (pos <= target.size()) {
    const std::size_t next = std::min(target.find('/', pos), target.size());
    const std::string_view segment = target.substr(pos, next - pos);
    if (segment == ".." || segment.find('\\') != std::string_view::npos ||
        segment.find('\0') != std::string_view::npos || segment.find('%') != std::string_view::npos) {
      return {};
    }
    if (!segment.empty() && segment != ".") {
      rel /= std::string(segment);
    }
    pos = next + 1;
  }
  std::filesystem::path full = root / rel;
  if (rel.empty() || target.back() == '/' || std::filesystem::is_directory(full)) {
    full /= "index.html";
  }
  return full;
}

namespace {

bus::Envelope control(std::string_view topic, json payload, double stamp) {
  bus::Envelope env;
  env.topic = std::string(topic);
  env.type = "Meta";
  env.stamp = stamp;
  env.payload = std::move(payload);
  return env;
}

}  // namespace

class WsSession;

struct Gateway::Impl {
  Impl(bus::Broker& b, std::uint16_t port, const std::string& address, std::filesystem::path dir)
      : broker(b), acceptor(io), console_dir(std::move(dir)) {
    boost::system::error_code ec;
    const tcp::endpoint endpoint(asio::ip::make_address(address, ec), port);
    if (ec) {
      throw bus::BusError(bus::BusErrc::kConnection, "bad bind address " + address);
    }
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) acceptor.set_option(tcp::acceptor::reuse_address(true), ec);
    if (!ec) acceptor.bind(endpoint, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw bus::BusError(bus::BusErrc::kConnection, "cannot listen on " + address + ":" +
                                                         std::to_string(port) + ": " +
                                                         ec.message());
    }
    bound_port = acceptor.local_endpoint().port();
  }

  void accept();

  bus::Broker& broker;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::filesystem::path console_dir;
  std::uint16_t bound_port = 0;
  std::thread thread;
  std::mutex sessions_mutex;
  std::set<std::shared_ptr<WsSession>> sessions;
  std::atomic<std::size_t> session_total{0};
  bool stopped = false;
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Gateway::Impl& owner)
      : ws_(std::move(socket)), owner_(owner), broker_(owner.broker) {}

  void start(http::request<http::string_body> req) {
    ws_.text(true);
    ws_.read_message_max(bus::kMaxFrameBytes);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) {
        self->close();
        return;
      }
      self->open();
    });
  }

  void close() {
    if (closed_) {
      return;
    }
    closed_ = true;
    if (sub_) {
      broker_.unsubscribe(sub_);
    }
    beast::get_lowest_layer(ws_).close();
    std::lock_guard lock(owner_.sessions_mutex);
    if (owner_.sessions.erase(shared_from_this()) != 0) {
      --owner_.session_total;
    }
  }

 private:
  void open() {
    sub_ = broker_.subscribe("");
    std::weak_ptr<WsSession> weak = shared_from_this();
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
    read();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      if (!self->closed_) {
        self->read();
      }
    });
  }

  void reply_error(bus::BusErrc code, const std::string& message) {
    queue(control(bus::meta::kError, {{"code", bus::to_string(code)}, {"message", message}},
                  broker_.now()));
  }

  void handle(const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      reply_error(bus::BusErrc::kBadJson, e.what());
      return;
    }
    if (j.is_object() && (j.contains("subscribe") || j.contains("unsubscribe"))) {
      const bool subscribe = j.contains("subscribe");
      const json& pattern = subscribe ? j["subscribe"] : j["unsubscribe"];
      if (!pattern.is_string()) {
        reply_error(bus::BusErrc::kBadPattern, "pattern must be a string");
        return;
      }
      const std::string p = pattern.get<std::string>();
      try {
        if (subscribe) {
          broker_.add_pattern(sub_, p);
        } else {
          broker_.remove_pattern(sub_, p);
        }
        queue(control(subscribe ? bus::meta::kSubscribed : bus::meta::kUnsubscribed,
                      {{"pattern", p}}, broker_.now()));
      } catch (const bus::BusError& e) {
        reply_error(e.code(), e.what());
      }
      return;
    }
    bus::Envelope env;
    try {
      env = bus::envelope_from_json(j);
      if (env.topic.starts_with("/meta/")) {
        throw bus::BusError(bus::BusErrc::kProtocol, "/meta topics are reserved");
      }
      env.stamp = broker_.now();
      broker_.publish(std::move(env), "gateway");
    } catch (const bus::BusError& e) {
      reply_error(e.code(), e.what());
    }
  }

  void queue(const bus::Envelope& env) {
    control_out_.push_back(bus::dump_envelope(env));
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
      std::optional<bus::Envelope> next = sub_ ? sub_->try_pop() : std::nullopt;
      if (!next) {
        return;
      }
      current_ = bus::dump_envelope(*next);
    }
    writing_ = true;
    ws_.async_write(asio::buffer(current_),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->writing_ = false;
                      if (ec) {
                        self->close();
                        return;
                      }
                      self->pump();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Gateway::Impl& owner_;
  bus::Broker& broker_;
  beast::flat_buffer buffer_;
  std::shared_ptr<bus::Subscription> sub_;
  std::deque<std::string> control_out_;
  std::string current_;
  bool writing_ = false;
  bool closed_ = false;
  std::shared_ptr<std::atomic<bool>> pump_posted_ = std::make_shared<std::atomic<bool>>(false);
};

// Plain HTTP until the request is a WebSocket upgrade.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Gateway::Impl& owner)
      : stream_(std::move(socket)), owner_(owner) {}

  void start() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) {
                         beast::error_code ignored;
                         self->stream_.socket().shutdown(tcp::socket::shutdown_both, ignored);
                         return;
                       }
                       self->handle();
                     });
  }

  void handle() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      auto session = std::make_shared<WsSession>(stream_.release_socket(), owner_);
      {
        std::lock_guard lock(owner_.sessions_mutex);
        owner_.sessions.insert(session);
        ++owner_.session_total;
      }
      session->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(req_.keep_alive());
    res->set(http::field::server, "sociobot");
    if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
      res->result(http::status::method_not_allowed);
      res->set(http::field::allow, "GET, HEAD");
    } else if (const auto path = resolve_static(owner_.console_dir,
                                                std::string_view(req_.target().data(),
                                                                 req_.target().size()));
               path.empty()) {
      res->result(path.empty() && !owner_.console_dir.empty() ? http::status::bad_request
                                                              : http::status::not_found);
    } else {
      beast::error_code ec;
      http::file_body::value_type file;
      file.open(path.c_str(), beast::file_mode::scan, ec);
      if (ec || !std::filesystem::is_regular_file(path)) {
        res->result(http::status::not_found);
        res->set(http::field::content_type, "text/plain; charset=utf-8");
        res->body() = "not found\n";
      } else {
        res->result(http::status::ok);
        res->set(http::field::content_type, std::string(content_type(path)));
        std::string body(static_cast<std::size_t>(file.size()), '\0');
        file.file().read(body.data(), body.size(), ec);
        if (req_.method() == http::verb::get) {
          res->body() = std::move(body);
        } else {
          res->content_length(body.size());
        }
      }
    }
    if (req_.method() != http::verb::head) {
      res->prepare_payload();
    }
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec || !res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream_;
  Gateway::Impl& owner_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

void Gateway::Impl::accept() {
  acceptor.async_accept([this](boost::system::error_code ec, tcp::socket socket) {
    if (ec) {
      return;  // acceptor closed
    }
    boost::system::error_code ignored;
    socket.set_option(tcp::no_delay(true), ignored);
    std::make_shared<HttpSession>(std::move(socket), *this)->start();
    accept();
  });
}

Gateway::Gateway(bus::Broker& broker, std::uint16_t port, std::string bind_address,
                 std::filesystem::path console_dir)
    : impl_(std::make_unique<Impl>(broker, port, bind_address, std::move(console_dir))) {
  impl_->accept();
  impl_->thread = std::thread([impl = impl_.get()] { impl->io.run(); });
}

Gateway::~Gateway() { stop(); }

std::uint16_t Gateway::port() const { return impl_->bound_port; }

std::size_t Gateway::session_count() const { return impl_->session_total.load(); }

void Gateway::stop() {
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
  std::set<std::shared_ptr<WsSession>> sessions;
  {
    std::lock_guard lock(impl_->sessions_mutex);
    sessions = impl_->sessions;
  }
  for (const auto& s : sessions) {
    s->close();
  }
}

}  // namespace sociobot::opsd
