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

#ifndef TOUCHBOARD_SERVER_HPP_
#define TOUCHBOARD_SERVER_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "touchboard/engine.hpp"
#include "touchboard/protocol.hpp"

namespace touchboard::net {

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultPort;  // 0 binds an ephemeral port
  EngineConfig engine;
  std::filesystem::path task_dir = default_task_dir();
  std::optional<std::string> initial_task;
  // Static files served over HTTP on the same port, for the browser client.
  std::optional<std::filesystem::path> ui_dir;
  // Where record_start/record_stop write recordings.
  std::filesystem::path record_dir = ".";
  // When set, the first controller session is recorded to this file from
  // its first reset until it disconnects.
  std::optional<std::filesystem::path> capture_to;
  int threads = 4;
};

// One engine behind one port. Each connection speaks either the binary
// framing or, when it opens with an HTTP request, HTTP for the static UI
// and a WebSocket upgrade carrying the text framing. One controller at a
// time drives the engine; any number of viewers receive copies of its
// TIMESTEP/FRAME pairs.
//
// Control verbs: list_tasks, load_task {id}, status, record_start
// {file?, policy?}, record_stop.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and starts accepting on background threads.
  void start();
  std::uint16_t port() const;
  // Closes every connection and joins the worker threads. Idempotent.
  void stop();
  // Blocks until SIGINT/SIGTERM, then stops.
  void run_until_signal();

  // Path of the most recent recording written by record_stop or by a
  // controller disconnecting while recording.
  std::optional<std::filesystem::path> last_recording() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace touchboard::net

#endif  // TOUCHBOARD_SERVER_HPP_
