// Copyright 2026 The Touchboard Authors
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

#include "touchboard/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <functional>
#include <iterator>
#include <mutex>
#include <thread>

#include "touchboard/recording.hpp"

namespace touchboard::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

enum class Role { kNone, kController, kViewer };

// Bound on queued broadcast batches per viewer; older ones are dropped.
constexpr std::size_t kViewerBacklog = 32;

class Hub;

// One client connection. Writes go through a queue drained on the
// connection's strand, so replies keep the order in which they were posted.
class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(asio::any_io_executor executor, Hub& hub) : executor_(std::move(executor)), hub_(hub) {}
  virtual ~Connection() = default;

  virtual void start() = 0;

  // Thread-safe. Droppable batches may be discarded when the client lags.
  void post(const std::vector<Message>& batch, bool droppable = false);
  void post(const Message& m) { post(std::vector<Message>{m}); }
  // Thread-safe: close once everything queued so far is written.
  void close_after_flush();

  // Guarded by the hub mutex.
  Role role = Role::kNone;
  bool greeted = false;

 protected:
  struct Outgoing {
    std::vector<std::string> parts;
    bool droppable = false;
  };

  virtual std::vector<std::string> serialize(const std::vector<Message>& batch) const = 0;
  virtual void async_send(const std::string& part, std::function<void(beast::error_code)> done) = 0;
  virtual void close_transport() = 0;

  void on_message(const Message& m);
  void on_protocol_error(const Error& e);
  void do_close();

  asio::any_io_executor executor_;
  Hub& hub_;

 private:
  void write_next();

  std::deque<Outgoing> queue_;
  std::optional<Outgoing> current_;
  std::size_t part_ = 0;
  bool close_when_idle_ = false;
  bool closed_ = false;
};

class Hub {
 public:
  explicit Hub(const ServerConfig& cfg) : cfg_(cfg), registry_(cfg.task_dir), engine_(cfg.engine) {
    if (cfg.initial_task) engine_.load_task(registry_.get(*cfg.initial_task));
  }

  void handle(const std::shared_ptr<Connection>& c, const Message& m) {
    std::lock_guard lock(mu_);
    try {
      dispatch(c, m);
    } catch (const Error& e) {
      c->post(Message::error(e.code(), e.detail()));
    } catch (const json::exception& e) {
      c->post(Message::error(ErrorCode::kMalformedBody, e.what()));
    } catch (const std::exception& e) {
      c->post(Message::error(ErrorCode::kIoError, e.what()));
    }
  }

  void detach(const Connection* c) {
    std::lock_guard lock(mu_);
    drop_role(c);
  }

  std::optional<std::filesystem::path> last_recording() const {
    std::lock_guard lock(mu_);
    return last_recording_;
  }

 private:
  void dispatch(const std::shared_ptr<Connection>& c, const Message& m) {
    if (m.tag == Tag::kHello) return hello(c, m.body);
    if (!c->greeted) throw Error(ErrorCode::kHandshakeRequired, "send HELLO first");
    switch (m.tag) {
      case Tag::kSpec:
        c->post(Message::make(Tag::kSpec, spec_body()));
        return;
      case Tag::kControl:
        return control(c, m.body);
      case Tag::kReset: {
        require_controller(c);
        const TimeStep ts = engine_.reset();
        if (recorder_) recorder_->on_reset(ts);
        return publish(c, ts);
      }
      case Tag::kStep:
        require_controller(c);
        return step(c, m.body);
      case Tag::kExtrasReq:
        require_controller(c);
        c->post(Message::make(Tag::kExtras, {{"extras", extras_to_json(engine_.request_extras())}}));
        return;
      default:
        throw Error(ErrorCode::kMalformedBody, "clients do not send " + std::string(tag_name(m.tag)));
    }
  }

  void hello(const std::shared_ptr<Connection>& c, const json& body) {
    const auto version = body.find("version");
    if (version == body.end() || !version->is_number_integer()) {
      throw Error(ErrorCode::kMalformedBody, "HELLO needs an integer version");
    }
    if (version->get<std::int64_t>() != kProtocolVersion) {
      c->post(Message::error(ErrorCode::kVersionMismatch,
                             "server speaks version " + std::to_string(kProtocolVersion)));
      c->close_after_flush();
      return;
    }
    const std::string role = body.value("role", std::string("controller"));
    if (role != "controller" && role != "viewer") {
      throw Error(ErrorCode::kInvalidArgument, "role must be controller or viewer");
    }
    if (role == "controller") {
      const auto current = controller_.lock();
      if (current && current.get() != c.get()) {
        throw Error(ErrorCode::kSessionBusy, "another controller is connected");
      }
      drop_role(c.get());
      controller_ = c;
      c->role = Role::kController;
      if (cfg_.capture_to && !captured_ && engine_.has_task()) {
        captured_ = true;
        recording_path_ = *cfg_.capture_to;
        recorder_.emplace(engine_, "human");
      }
    } else {
      drop_role(c.get());
      viewers_.push_back(c);
      c->role = Role::kViewer;
    }
    c->greeted = true;
    const auto task = engine_.task();
    c->post(Message::make(Tag::kHello, {{"version", kProtocolVersion},
                                        {"role", role},
                                        {"server", "touchboard"},
                                        {"task", task ? json(task->id) : json(nullptr)}}));
  }

  void step(const std::shared_ptr<Connection>& c, const json& body) {
    std::vector<RawAction> actions;
    if (const auto it = body.find("actions"); it != body.end()) {
      if (!it->is_array()) throw Error(ErrorCode::kMalformedBody, "actions must be an array");
      actions = it->get<std::vector<RawAction>>();
    }
    const auto advance = body.value("advance_us", Micros{0});
    if (advance < 0) throw Error(ErrorCode::kInvalidArgument, "advance_us must not be negative");
    if (advance > 0) engine_.advance(advance);
    TimeStep ts;
    if (const auto it = body.find("fetch_at_us"); it != body.end()) {
      ts = engine_.step_until(actions, it->get<Micros>());
    } else {
      ts = engine_.step(actions);
    }
    if (recorder_) recorder_->on_step(actions, ts);
    publish(c, ts);
  }

  void control(const std::shared_ptr<Connection>& c, const json& body) {
    const std::string verb = body.at("verb").get<std::string>();
    json reply{{"verb", verb}, {"ok", true}};
    if (verb == "list_tasks") {
      reply["tasks"] = registry_.ids();
    } else if (verb == "status") {
      const EngineStatus s = engine_.status();
      reply["task"] = s.task_id.empty() ? json(nullptr) : json(s.task_id);
      reply["started"] = s.started;
      reply["episode_over"] = s.episode_over;
      reply["episode_index"] = s.episode_index;
      reply["episode_steps"] = s.episode_steps;
      reply["sim_time_us"] = s.sim_time;
      reply["clock"] = std::string(clock_mode_name(s.clock));
      reply["controller"] = !controller_.expired();
      reply["viewers"] = live_viewers().size();
      reply["recording"] = recorder_.has_value();
    } else if (verb == "load_task") {
      require_controller(c);
      if (recorder_) throw Error(ErrorCode::kInvalidArgument, "stop recording before loading a task");
      engine_.load_task(registry_.get(body.at("id").get<std::string>()));
      reply["task"] = body.at("id");
    } else if (verb == "record_start") {
      require_controller(c);
      if (recorder_) throw Error(ErrorCode::kInvalidArgument, "already recording");
      if (!engine_.has_task()) throw Error(ErrorCode::kTaskLoadError, "load a task before recording");
      recording_path_ = recording_path(body.value("file", std::string()));
      recorder_.emplace(engine_, body.value("policy", std::string("human")));
      reply["path"] = recording_path_.string();
    } else if (verb == "record_stop") {
      require_controller(c);
      if (!recorder_) throw Error(ErrorCode::kInvalidArgument, "not recording");
      reply["steps"] = recorder_->size();
      reply["path"] = finish_recording().string();
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown control verb '" + verb + "'");
    }
    c->post(Message::make(Tag::kControl, reply));
    if (verb == "load_task") c->post(Message::make(Tag::kSpec, spec_body()));
  }

  json spec_body() const {
    const auto task = engine_.task();
    const EngineConfig& cfg = engine_.config();
    return {{"protocol_version", kProtocolVersion},
            {"task", task ? task_to_json(*task) : json(nullptr)},
            {"engine", engine_config_to_json(cfg)},
            {"observation",
             {{"width", cfg.native_width},
              {"height", cfg.native_height},
              {"orientation", static_cast<int>(cfg.orientation)}}},
            {"action_space", {{"kind", "raw"}, {"types", {"TOUCH", "LIFT", "REPEAT"}}}}};
  }

  void publish(const std::shared_ptr<Connection>& c, const TimeStep& ts) {
    const std::uint32_t id = next_frame_id_++;
    const std::vector<Message> batch{Message::make(Tag::kTimeStep, timestep_body(ts, id)),
                                     Message::make_frame(id, ts.observation.pixels.data())};
    c->post(batch);
    for (const auto& v : live_viewers()) v->post(batch, true);
  }

  void require_controller(const std::shared_ptr<Connection>& c) const {
    if (c->role != Role::kController) throw Error(ErrorCode::kSessionBusy, "only the controller may do this");
  }

  std::vector<std::shared_ptr<Connection>> live_viewers() {
    std::vector<std::shared_ptr<Connection>> out;
    std::erase_if(viewers_, [](const auto& w) { return w.expired(); });
    for (const auto& w : viewers_) {
      if (auto v = w.lock()) out.push_back(std::move(v));
    }
    return out;
  }

  void drop_role(const Connection* c) {
    if (controller_.lock().get() == c) {
      controller_.reset();
      if (recorder_) {
        try {
          finish_recording();
        } catch (const Error&) {
          recorder_.reset();
        }
      }
    }
    std::erase_if(viewers_, [c](const auto& w) {
      const auto v = w.lock();
      return !v || v.get() == c;
    });
  }

  std::filesystem::path recording_path(const std::string& requested) {
    std::string name = std::filesystem::path(requested).filename().string();
    if (name.empty()) {
      const auto now = std::chrono::system_clock::now().time_since_epoch();
      name = engine_.task()->id + "-" + std::to_string(std::chrono::duration_cast<std::chrono::seconds>(now).count()) +
             "-" + std::to_string(++recordings_) + ".tbrc";
    }
    if (name == "." || name == "..") throw Error(ErrorCode::kInvalidArgument, "bad recording file name");
    return cfg_.record_dir / name;
  }

  std::filesystem::path finish_recording() {
    Recorder recorder = std::move(*recorder_);
    recorder_.reset();
    if (!recorder.started()) throw Error(ErrorCode::kInvalidArgument, "nothing recorded: no reset since record_start");
    recorder.take().save(recording_path_);
    last_recording_ = recording_path_;
    return recording_path_;
  }

  mutable std::mutex mu_;
  ServerConfig cfg_;
  TaskRegistry registry_;
  Engine engine_;
  std::weak_ptr<Connection> controller_;
  std::vector<std::weak_ptr<Connection>> viewers_;
  std::uint32_t next_frame_id_ = 0;
  std::optional<Recorder> recorder_;
  std::filesystem::path recording_path_;
  std::optional<std::filesystem::path> last_recording_;
  int recordings_ = 0;
  bool captured_ = false;
};

void Connection::post(const std::vector<Message>& batch, bool droppable) {
  Outgoing out{serialize(batch), droppable};
  asio::post(executor_, [self = shared_from_this(), out = std::move(out)]() mutable {
    if (self->closed_) return;
    const bool droppable = out.droppable;
    self->queue_.push_back(std::move(out));
    if (droppable) {
      std::size_t queued = 0;
      for (const Outgoing& o : self->queue_) queued += o.droppable;
      for (auto it = self->queue_.begin(); queued > kViewerBacklog && it != self->queue_.end();) {
        if (it->droppable) {
          it = self->queue_.erase(it);
          --queued;
        } else {
          ++it;
        }
      }
    }
    if (!self->current_) self->write_next();
  });
}

void Connection::close_after_flush() {
  asio::post(executor_, [self = shared_from_this()] {
    self->close_when_idle_ = true;
    if (!self->current_ && self->queue_.empty()) self->do_close();
  });
}

void Connection::write_next() {
  if (!current_) {
    if (queue_.empty()) {
      if (close_when_idle_) do_close();
      return;
    }
    current_ = std::move(queue_.front());
    queue_.pop_front();
    part_ = 0;
  }
  async_send(current_->parts[part_], [self = shared_from_this()](beast::error_code ec) {
    if (ec) {
      self->do_close();
      return;
    }
    if (++self->part_ == self->current_->parts.size()) self->current_.reset();
    self->write_next();
  });
}

void Connection::on_message(const Message& m) { hub_.handle(shared_from_this(), m); }

void Connection::on_protocol_error(const Error& e) { post(Message::error(e.code(), e.detail())); }

void Connection::do_close() {
  if (closed_) return;
  closed_ = true;
  queue_.clear();
  close_transport();
  hub_.detach(this);
}

// Binary framing over a plain TCP stream.
class TcpConnection final : public Connection {
 public:
  TcpConnection(tcp::socket socket, Hub& hub, std::uint8_t first_byte)
      : Connection(socket.get_executor(), hub), socket_(std::move(socket)), first_(first_byte) {}

  void start() override {
    decoder_.feed({&first_, 1});
    if (drain()) read();
  }

 private:
  std::vector<std::string> serialize(const std::vector<Message>& batch) const override {
    std::string wire;
    for (const Message& m : batch) {
      const auto bytes = encode(m);
      wire.append(bytes.begin(), bytes.end());
    }
    return {std::move(wire)};
  }

  void async_send(const std::string& part, std::function<void(beast::error_code)> done) override {
    asio::async_write(socket_, asio::buffer(part),
                      [done = std::move(done)](beast::error_code ec, std::size_t) { done(ec); });
  }

  void close_transport() override {
    beast::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

  void read() {
    socket_.async_read_some(asio::buffer(buffer_),
                            [self = std::static_pointer_cast<TcpConnection>(shared_from_this())](
                                beast::error_code ec, std::size_t n) {
                              if (ec) {
                                self->do_close();
                                return;
                              }
                              self->decoder_.feed({self->buffer_.data(), n});
                              if (self->drain()) self->read();
                            });
  }

  // Handles every complete message; false once the stream cannot go on.
  bool drain() {
    while (true) {
      try {
        std::optional<Message> m = decoder_.next();
        if (!m) return true;
        on_message(*m);
      } catch (const Error& e) {
        on_protocol_error(e);
        if (e.code() == ErrorCode::kFrameTooLarge) {
          close_after_flush();
          return false;
        }
      }
    }
  }

  tcp::socket socket_;
  std::uint8_t first_;
  std::array<std::uint8_t, 64 * 1024> buffer_{};
  FrameDecoder decoder_;
};

// Text framing over a WebSocket, for browsers.
class WsConnection final : public Connection {
 public:
  WsConnection(tcp::socket socket, Hub& hub, http::request<http::string_body> request)
      : Connection(socket.get_executor(), hub), ws_(std::move(socket)), request_(std::move(request)) {}

  void start() override {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxPayload);
    ws_.text(true);
    ws_.async_accept(request_, [self = std::static_pointer_cast<WsConnection>(shared_from_this())](
                                   beast::error_code ec) {
      if (ec) {
        self->do_close();
        return;
      }
      self->read();
    });
  }

 private:
  std::vector<std::string> serialize(const std::vector<Message>& batch) const override {
    std::vector<std::string> parts;
    for (const Message& m : batch) parts.push_back(encode_text(m));
    return parts;
  }

  void async_send(const std::string& part, std::function<void(beast::error_code)> done) override {
    ws_.async_write(asio::buffer(part), [done = std::move(done)](beast::error_code ec, std::size_t) { done(ec); });
  }

  void close_transport() override {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).close();
  }

  void read() {
    ws_.async_read(buffer_, [self = std::static_pointer_cast<WsConnection>(shared_from_this())](
                                beast::error_code ec, std::size_t) {
      if (ec) {
        self->do_close();
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      try {
        self->on_message(decode_text(text));
      } catch (const Error& e) {
        self->on_protocol_error(e);
      }
      self->read();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  http::request<http::string_body> request_;
  beast::flat_buffer buffer_;
};

std::string_view mime_type(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  return "application/octet-stream";
}

// One HTTP request: a WebSocket upgrade, or a static file from the UI bundle.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Hub& hub, std::optional<std::filesystem::path> ui_dir, std::uint8_t first)
      : stream_(std::move(socket)), hub_(hub), ui_dir_(std::move(ui_dir)) {
    const auto b = buffer_.prepare(1);
    *static_cast<std::uint8_t*>(b.data()) = first;
    buffer_.commit(1);
  }

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, request_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->close();
      self->on_request();
    });
  }

 private:
  void on_request() {
    if (websocket::is_upgrade(request_)) {
      stream_.expires_never();
      std::make_shared<WsConnection>(stream_.release_socket(), hub_, std::move(request_))->start();
      return;
    }
    response_ = make_response();
    response_.keep_alive(false);
    response_.prepare_payload();
    http::async_write(stream_, response_, [self = shared_from_this()](beast::error_code, std::size_t) {
      self->close();
    });
  }

  http::response<http::string_body> make_response() const {
    http::response<http::string_body> res;
    res.version(request_.version());
    res.set(http::field::server, "touchboard");
    auto fail = [&](http::status status, std::string text) {
      res.result(status);
      res.set(http::field::content_type, "text/plain");
      res.body() = std::move(text);
      return res;
    };
    if (request_.method() != http::verb::get && request_.method() != http::verb::head) {
      return fail(http::status::method_not_allowed, "GET only\n");
    }
    if (!ui_dir_) return fail(http::status::not_found, "this server has no UI bundle (start it with --ui)\n");
    std::string target(request_.target());
    target = target.substr(0, target.find('?'));
    if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
      return fail(http::status::bad_request, "bad path\n");
    }
    if (target.back() == '/') target += "index.html";
    const std::filesystem::path file = *ui_dir_ / target.substr(1);
    std::ifstream in(file, std::ios::binary);
    if (!in || std::filesystem::is_directory(file)) return fail(http::status::not_found, "not found\n");
    res.result(http::status::ok);
    res.set(http::field::content_type, std::string(mime_type(file)));
    res.body().assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (request_.method() == http::verb::head) res.body().clear();
    return res;
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_both, ec);
    stream_.close();
  }

  beast::tcp_stream stream_;
  Hub& hub_;
  std::optional<std::filesystem::path> ui_dir_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  http::response<http::string_body> response_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerConfig c) : cfg(std::move(c)), hub(cfg) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (!acceptor.is_open()) return;
      if (!ec) sniff(std::move(socket));
      accept();
    });
  }

  // The first byte picks the framing. A binary frame starts with the high
  // byte of a length capped at 16 MiB, so it can never be 'G'.
  void sniff(tcp::socket s) {
    auto socket = std::make_shared<tcp::socket>(std::move(s));
    auto byte = std::make_shared<std::uint8_t>(0);
    asio::async_read(*socket, asio::buffer(byte.get(), 1), [this, socket, byte](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (*byte == 'G') {
        std::make_shared<HttpSession>(std::move(*socket), hub, cfg.ui_dir, *byte)->start();
      } else {
        std::make_shared<TcpConnection>(std::move(*socket), hub, *byte)->start();
      }
    });
  }

  ServerConfig cfg;
  Hub hub;
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> threads;
  std::uint16_t port = 0;
  bool started = false;
  std::atomic<bool> stopped{false};
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_->started) return;
  Impl& s = *impl_;
  const tcp::endpoint endpoint(asio::ip::make_address(s.cfg.host), s.cfg.port);
  try {
    s.acceptor.open(endpoint.protocol());
    s.acceptor.set_option(asio::socket_base::reuse_address(true));
    s.acceptor.bind(endpoint);
    s.acceptor.listen();
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::kIoError, "cannot listen on " + s.cfg.host + ":" + std::to_string(s.cfg.port) + ": " +
                                         e.what());
  }
  s.port = s.acceptor.local_endpoint().port();
  s.started = true;
  s.accept();
  for (int i = 0; i < std::max(1, s.cfg.threads); ++i) s.threads.emplace_back([&s] { s.ioc.run(); });
}

std::uint16_t Server::port() const { return impl_->port; }

void Server::stop() {
  Impl& s = *impl_;
  if (!s.started || s.stopped.exchange(true)) return;
  asio::post(s.ioc, [&s] {
    beast::error_code ec;
    s.acceptor.close(ec);
  });
  s.ioc.stop();
  for (std::thread& t : s.threads) t.join();
  s.threads.clear();
}

void Server::run_until_signal() {
  std::mutex mu;
  std::condition_variable cv;
  bool signalled = false;
  asio::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([&](beast::error_code, int) {
    std::lock_guard lock(mu);
    signalled = true;
    cv.notify_all();
  });
  {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return signalled; });
  }
  stop();
}

std::optional<std::filesystem::path> Server::last_recording() const { return impl_->hub.last_recording(); }

}  // namespace touchboard::net
