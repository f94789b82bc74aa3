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

#ifndef SOCIOBOT_OPSD_GATEWAY_HPP_
#define SOCIOBOT_OPSD_GATEWAY_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "sociobot/bus/broker.hpp"

namespace sociobot::opsd {

// Content type for a static file, by extension.
std::string_view content_type(const std::filesystem::path& path);

// Maps a request target onto a file under `root`. Empty when the target
// escapes the root (".." segments, backslashes, NUL) or is malformed.
// "/" and directory targets map to index.html.
std::filesystem::path resolve_static(const std::filesystem::path& root, std::string_view target);

// Browser-facing side of the bus: HTTP and WebSocket on one port.
//
// GET serves files from console_dir. A WebSocket upgrade on any path opens
// a session that carries one envelope (canonical JSON, the same bytes as
// the TCP framing body) per text message. Client messages:
//   {"subscribe": pattern}    -> {"topic": "/meta/subscribed", ...}
//   {"unsubscribe": pattern}  -> {"topic": "/meta/unsubscribed", ...}
//   an envelope               -> published as "gateway", re-stamped
// Errors come back as /meta/error {code, message} envelopes. Each session
// has its own drop-oldest queue.
class Gateway {
 public:
  // port 0 picks an ephemeral port. Throws BusError(kConnection).
  Gateway(bus::Broker& broker, std::uint16_t port, std::string bind_address = "127.0.0.1",
          std::filesystem::path console_dir = {});
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  std::uint16_t port() const;
  std::size_t session_count() const;  // open WebSocket sessions
  void stop();

 private:
  friend class WsSession;
  friend class HttpSession;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sociobot::opsd

#endif  // SOCIOBOT_OPSD_GATEWAY_HPP_
