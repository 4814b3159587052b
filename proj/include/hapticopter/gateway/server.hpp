#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "hapticopter/gateway/record.hpp"
#include "hapticopter/gateway/session.hpp"

namespace hapticopter::gateway {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct ServerOptions {
  Scenario scenario = build_scenario(Task::GateCourse);
  SessionConfig session;
  std::string log_dir;        // empty: $HAPTICOPTER_LOG_DIR, else the working directory
  bool write_records = true;
  std::size_t high_water = 64;
  // Called on the io thread when a session ends.
  std::function<void(const SessionRecord&, const SessionCore&)> on_session_end;
};

inline std::string default_log_dir() {
  if (const char* d = std::getenv("HAPTICOPTER_LOG_DIR"); d && *d) return d;
  return ".";
}

namespace detail {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const ServerOptions& options, std::uint64_t id)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        options_(options),
        id_(id),
        core_(options.scenario, with_seed(options.session, id)),
        queue_(options.high_water) {}

  void start() {
    auto self = shared_from_this();
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self](beast::error_code ec, std::size_t) { self->on_request(ec); });
  }

 private:
  static SessionConfig with_seed(SessionConfig c, std::uint64_t id) {
    c.seed ^= id;
    return c;
  }

  void on_request(beast::error_code ec) {
    if (ec) return;
    if (!websocket::is_upgrade(request_) || request_.target() != "/session") {
      auto res = std::make_shared<http::response<http::string_body>>(http::status::not_found,
                                                                     request_.version());
      res->set(http::field::content_type, "text/plain");
      res->body() = "websocket endpoint is /session\n";
      res->prepare_payload();
      auto self = shared_from_this();
      http::async_write(ws_.next_layer(), *res, [self, res](beast::error_code, std::size_t) {
        beast::error_code ignored;
        self->ws_.next_layer().socket().shutdown(tcp::socket::shutdown_both, ignored);
      });
      return;
    }
    ws_.text(true);
    // Stop ticking and writing once the peer starts a close so the close
    // reply is not stuck behind a stream of state updates.
    ws_.control_callback([this](websocket::frame_type kind, beast::string_view) {
      if (kind != websocket::frame_type::close) return;
      closing_ = true;
      timer_.cancel();
    });
    auto self = shared_from_this();
    ws_.async_accept(request_, [self](beast::error_code ec2) {
      if (ec2) return;
      self->open_ = true;
      self->next_tick_ = std::chrono::steady_clock::now();
      self->read();
      self->schedule_tick();
    });
  }

  void read() {
    auto self = shared_from_this();
    ws_.async_read(buffer_, [self](beast::error_code ec, std::size_t) {
      if (ec) return self->finish();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      for (auto& m : self->core_.handle_text(text)) self->queue_.push(std::move(m));
      self->flush();
      if (!self->core_.closed()) self->read();
    });
  }

  void schedule_tick() {
    const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(core_.config().loop.sim.dt));
    next_tick_ += period;
    timer_.expires_at(next_tick_);
    auto self = shared_from_this();
    timer_.async_wait([self](beast::error_code ec) {
      if (ec || !self->open_ || self->closing_) return;
      for (auto& m : self->core_.tick()) self->queue_.push(std::move(m));
      self->flush();
      self->schedule_tick();
    });
  }

  void flush() {
    if (writing_ || !open_ || closing_) return;
    if (queue_.empty()) {
      if (core_.closed()) close();
      return;
    }
    writing_ = true;
    out_ = serialize(queue_.pop());
    auto self = shared_from_this();
    ws_.async_write(net::buffer(out_), [self](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) return self->finish();
      self->flush();
    });
  }

  void close() {
    auto self = shared_from_this();
    ws_.async_close(websocket::close_code::normal, [self](beast::error_code) { self->finish(); });
  }

  void finish() {
    if (finished_) return;
    finished_ = true;
    open_ = false;
    timer_.cancel();
    if (!core_.established()) return;
    const SessionRecord record = record_session(core_);
    if (options_.write_records) {
      namespace fs = std::filesystem;
      const fs::path dir = options_.log_dir.empty() ? default_log_dir() : options_.log_dir;
      std::error_code ec;
      fs::create_directories(dir, ec);
      const auto stamp = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
      std::ofstream out(dir / ("session-" + std::to_string(stamp) + "-" + std::to_string(id_) + ".ndjson"));
      if (out) write_record(out, record);
    }
    if (options_.on_session_end) options_.on_session_end(record, core_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  const ServerOptions& options_;
  std::uint64_t id_;
  SessionCore core_;
  OutboundQueue queue_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  std::string out_;
  std::chrono::steady_clock::time_point next_tick_;
  bool open_ = false;
  bool writing_ = false;
  bool closing_ = false;
  bool finished_ = false;
};

}  // namespace detail

// Accepts WebSocket clients on /session; each connection owns one
// SessionCore paced by its own timer on the shared io_context.
class Server {
 public:
  Server(net::io_context& io, const tcp::endpoint& endpoint, ServerOptions options)
      : io_(io), acceptor_(io), options_(std::move(options)) {
    options_.session.validate();
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen(net::socket_base::max_listen_connections);
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void start() { accept(); }

  void stop() {
    beast::error_code ec;
    acceptor_.close(ec);
  }

 private:
  void accept() {
    acceptor_.async_accept(net::make_strand(io_), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<detail::Connection>(std::move(socket), options_, ++sessions_)->start();
      accept();
    });
  }

  net::io_context& io_;
  tcp::acceptor acceptor_;
  ServerOptions options_;
  std::uint64_t sessions_ = 0;
};

}  // namespace hapticopter::gateway
