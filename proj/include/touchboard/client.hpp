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

#ifndef TOUCHBOARD_CLIENT_HPP_
#define TOUCHBOARD_CLIENT_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "touchboard/environment.hpp"
#include "touchboard/protocol.hpp"

namespace touchboard::net {

// Blocking client over the binary framing. As a controller it is an
// Environment like any other; as a viewer it only receives.
class RemoteEnvironment final : public Environment {
 public:
  RemoteEnvironment(const std::string& host, std::uint16_t port, const std::string& role = "controller",
                    int version = kProtocolVersion);
  ~RemoteEnvironment() override;

  TimeStep reset() override;
  using Environment::step;
  TimeStep step(std::span<const RawAction> actions) override;
  ExtrasMap request_extras() override;

  // VIRTUAL-clock servers only. advance() lets time pass before the next
  // step takes its actions; step_until() fetches at an exact time.
  void advance(Micros duration) { pending_advance_ += duration; }
  TimeStep step_until(std::span<const RawAction> actions, Micros fetch_at);

  nlohmann::json control(const std::string& verb, nlohmann::json args = nlohmann::json::object());
  std::vector<std::string> list_tasks();
  void load_task(const std::string& id);
  nlohmann::json spec();
  const nlohmann::json& hello() const { return hello_; }

  // Viewer side: the next TIMESTEP/FRAME pair the server pushes.
  TimeStep next_timestep();

  void send(const Message& m);
  // The next message; ERROR replies are thrown as Error with their code.
  Message receive();

 private:
  TimeStep step_impl(std::span<const RawAction> actions, std::optional<Micros> fetch_at);
  Message expect(Tag tag);

  struct Io;
  std::unique_ptr<Io> io_;
  FrameDecoder decoder_;
  nlohmann::json hello_;
  Micros pending_advance_ = 0;
};

}  // namespace touchboard::net

#endif  // TOUCHBOARD_CLIENT_HPP_
