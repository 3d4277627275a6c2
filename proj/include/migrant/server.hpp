// Copyright 2026 The Migrant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIGRANT_SERVER_HPP
#define MIGRANT_SERVER_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "migrant/protocol.hpp"
#include "migrant/service.hpp"

namespace migrant {

// WebSocket endpoint for embodiments. Each text message carries one or more
// newline-terminated frames. Frames for one session are handled in arrival
// order on that session's worker; MIGRATE_ACK is delivered straight away so
// a worker waiting on an ack never blocks it.
class Server {
 public:
  Server(AgentService& service, std::string address = "127.0.0.1", std::uint16_t port = 8700);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts serving in the background. Port 0 picks a free port.
  void start();
  void stop();
  // Blocks until stop() is called from another thread.
  void wait();

  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocking client, one frame per message. Used by tests and tooling.
class WsClient {
 public:
  WsClient(const std::string& host, std::uint16_t port,
           std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~WsClient();

  void send(const Envelope& env);
  void send_raw(const std::string& text);
  // Throws kTargetUnavailable on close or timeout.
  Envelope receive();
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace migrant

#endif  // MIGRANT_SERVER_HPP
