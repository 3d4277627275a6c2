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

#include "migrant/server.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "migrant/error.hpp"

namespace migrant {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

// Runs jobs for one session in submission order.
class SessionWorker {
 public:
  SessionWorker() : thread_([this] { loop(); }) {}

  ~SessionWorker() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_one();
    thread_.join();
  }

  void post(std::function<void()> job) {
    {
      std::lock_guard lock(mu_);
      jobs_.push_back(std::move(job));
    }
    cv_.notify_one();
  }

 private:
  void loop() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopping_ || !jobs_.empty(); });
        if (jobs_.empty()) return;
        job = std::move(jobs_.front());
        jobs_.pop_front();
      }
      job();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  bool stopping_ = false;
  std::thread thread_;
};

class Connection;

// Link handed to the orchestrator; writes are marshalled onto the I/O thread.
class WsLink : public Link {
 public:
  explicit WsLink(std::weak_ptr<Connection> conn) : conn_(std::move(conn)) {}
  bool alive() const override { return alive_.load(); }
  void send(const Envelope& env) override;
  void mark_closed() { alive_ = false; }

 private:
  std::weak_ptr<Connection> conn_;
  std::atomic<bool> alive_{true};
};

struct Shared {
  AgentService& service;
  std::mutex workers_mu;
  std::map<std::string, std::unique_ptr<SessionWorker>> workers;

  SessionWorker& worker(const std::string& session_id) {
    std::lock_guard lock(workers_mu);
    auto& w = workers[session_id];
    if (!w) w = std::make_unique<SessionWorker>();
    return *w;
  }
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Shared& shared)
      : ws_(std::move(socket)), shared_(shared) {}

  void start() {
    link_ = std::make_shared<WsLink>(weak_from_this());
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->closed(ec);
      self->read();
    });
  }

  void write(std::string frame) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), f = std::move(frame)]() mutable {
      self->outbox_.push_back(std::move(f));
      if (self->outbox_.size() == 1) self->flush();
    });
  }

  // I/O thread only.
  void close() {
    if (link_) link_->mark_closed();
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->closed(ec);
      self->reader_.feed(beast::buffers_to_string(self->buffer_.data()));
      self->buffer_.consume(self->buffer_.size());
      self->drain();
      self->read();
    });
  }

  void drain() {
    for (;;) {
      std::optional<Envelope> env;
      try {
        env = reader_.next();
      } catch (const Error& e) {
        Json payload = Json::object();
        payload["code"] = to_string(e.code());
        payload["message"] = e.what();
        Sequencer seq("", "");
        link_->send(seq.make(MsgType::kError, std::move(payload), 0));
        continue;
      }
      if (!env) return;
      if (env->msg_type == MsgType::kMigrateAck) {
        shared_.service.handle(*env, link_);
        continue;
      }
      shared_.worker(env->session_id).post(
          [&service = shared_.service, link = link_, e = std::move(*env)] {
            try {
              service.handle(e, link);
            } catch (const std::exception& ex) {
              spdlog::error("{}/{}: {}", e.session_id, e.embodiment_id, ex.what());
            }
          });
    }
  }

  void flush() {
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) return self->closed(ec);
                      self->outbox_.pop_front();
                      if (!self->outbox_.empty()) self->flush();
                    });
  }

  void closed(beast::error_code ec) {
    if (link_) link_->mark_closed();
    if (ec != websocket::error::closed && ec != asio::error::operation_aborted &&
        ec != asio::error::eof) {
      spdlog::debug("connection closed: {}", ec.message());
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  Shared& shared_;
  beast::flat_buffer buffer_;
  FrameReader reader_;
  std::deque<std::string> outbox_;
  std::shared_ptr<WsLink> link_;
};

void WsLink::send(const Envelope& env) {
  auto conn = conn_.lock();
  if (!conn || !alive_) throw Error(ErrorCode::kTargetUnavailable, "connection closed");
  conn->write(encode(env));
}

}  // namespace

struct Server::Impl {
  Impl(AgentService& service, std::string address, std::uint16_t port)
      : shared{service}, address(std::move(address)), requested_port(port) {}

  void accept() {
    acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto conn = std::make_shared<Connection>(std::move(socket), shared);
      connections.push_back(conn);
      conn->start();
      accept();
    });
  }

  Shared shared;
  std::string address;
  std::uint16_t requested_port;
  asio::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::vector<std::weak_ptr<Connection>> connections;
  std::thread io_thread;
  std::mutex mu;
  std::condition_variable cv;
  bool running = false;
};

Server::Server(AgentService& service, std::string address, std::uint16_t port)
    : impl_(std::make_unique<Impl>(service, std::move(address), port)) {}

Server::~Server() { stop(); }

void Server::start() {
  Impl& s = *impl_;
  tcp::endpoint endpoint(asio::ip::make_address(s.address), s.requested_port);
  s.acceptor.emplace(s.ioc);
  s.acceptor->open(endpoint.protocol());
  s.acceptor->set_option(asio::socket_base::reuse_address(true));
  s.acceptor->bind(endpoint);
  s.acceptor->listen();
  s.accept();
  {
    std::lock_guard lock(s.mu);
    s.running = true;
  }
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  spdlog::info("listening on {}:{}", s.address, port());
}

void Server::stop() {
  Impl& s = *impl_;
  {
    std::lock_guard lock(s.mu);
    if (!s.running) return;
    s.running = false;
  }
  asio::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor->close(ec);
    for (auto& weak : s.connections) {
      if (auto conn = weak.lock()) conn->close();
    }
    s.ioc.stop();
  });
  if (s.io_thread.joinable()) s.io_thread.join();
  {
    std::lock_guard lock(s.shared.workers_mu);
    s.shared.workers.clear();
  }
  s.cv.notify_all();
}

void Server::wait() {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait(lock, [&] { return !impl_->running; });
}

std::uint16_t Server::port() const {
  return impl_->acceptor ? impl_->acceptor->local_endpoint().port() : impl_->requested_port;
}

// ---------------------------------------------------------------------------

struct WsClient::Impl {
  asio::io_context ioc;
  websocket::stream<tcp::socket> ws{ioc};
  beast::flat_buffer buffer;
  FrameReader reader;
};

WsClient::WsClient(const std::string& host, std::uint16_t port,
                   std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>()) {
  try {
    tcp::resolver resolver(impl_->ioc);
    auto& sock = impl_->ws.next_layer();
    asio::connect(sock, resolver.resolve(host, std::to_string(port)));
    timeval tv{};
    tv.tv_sec = static_cast<long>(timeout.count() / 1000);
    tv.tv_usec = static_cast<long>(timeout.count() % 1000) * 1000;
    ::setsockopt(sock.native_handle(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    impl_->ws.text(true);
    impl_->ws.handshake(host, "/");
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::kTargetUnavailable, e.what());
  }
}

WsClient::~WsClient() {
  beast::error_code ec;
  impl_->ws.next_layer().close(ec);
}

void WsClient::send(const Envelope& env) { send_raw(encode(env)); }

void WsClient::send_raw(const std::string& text) {
  beast::error_code ec;
  impl_->ws.write(asio::buffer(text), ec);
  if (ec) throw Error(ErrorCode::kTargetUnavailable, ec.message());
}

Envelope WsClient::receive() {
  for (;;) {
    if (auto env = impl_->reader.next()) return *env;
    beast::error_code ec;
    impl_->ws.read(impl_->buffer, ec);
    if (ec) throw Error(ErrorCode::kTargetUnavailable, ec.message());
    impl_->reader.feed(beast::buffers_to_string(impl_->buffer.data()));
    impl_->buffer.consume(impl_->buffer.size());
  }
}

void WsClient::close() {
  beast::error_code ec;
  impl_->ws.close(websocket::close_code::normal, ec);
}

}  // namespace migrant
