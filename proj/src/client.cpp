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

#include "touchboard/client.hpp"

#include <boost/asio.hpp>

namespace touchboard::net {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using nlohmann::json;

struct RemoteEnvironment::Io {
  asio::io_context ioc;
  tcp::socket socket{ioc};
};

RemoteEnvironment::RemoteEnvironment(const std::string& host, std::uint16_t port, const std::string& role,
                                     int version)
    : io_(std::make_unique<Io>()) {
  try {
    tcp::resolver resolver(io_->ioc);
    asio::connect(io_->socket, resolver.resolve(host, std::to_string(port)));
    io_->socket.set_option(tcp::no_delay(true));
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::kIoError, "cannot connect to " + host + ":" + std::to_string(port) + ": " + e.what());
  }
  send(Message::make(Tag::kHello, {{"version", version}, {"role", role}}));
  hello_ = expect(Tag::kHello).body;
}

RemoteEnvironment::~RemoteEnvironment() {
  boost::system::error_code ec;
  io_->socket.shutdown(tcp::socket::shutdown_both, ec);
  io_->socket.close(ec);
}

void RemoteEnvironment::send(const Message& m) {
  const auto bytes = encode(m);
  try {
    asio::write(io_->socket, asio::buffer(bytes));
  } catch (const boost::system::system_error& e) {
    throw Error(ErrorCode::kIoError, std::string("send failed: ") + e.what());
  }
}

Message RemoteEnvironment::receive() {
  std::array<std::uint8_t, 64 * 1024> buffer{};
  while (true) {
    if (std::optional<Message> m = decoder_.next()) {
      if (m->tag == Tag::kError) {
        const std::string name = m->body.value("code", std::string());
        throw Error(parse_error_code(name).value_or(ErrorCode::kIoError),
                    m->body.value("message", std::string("server error")));
      }
      return std::move(*m);
    }
    boost::system::error_code ec;
    const std::size_t n = io_->socket.read_some(asio::buffer(buffer), ec);
    if (ec) throw Error(ErrorCode::kIoError, "connection closed: " + ec.message());
    decoder_.feed({buffer.data(), n});
  }
}

Message RemoteEnvironment::expect(Tag tag) {
  Message m = receive();
  if (m.tag != tag) {
    throw Error(ErrorCode::kMalformedBody,
                "expected " + std::string(tag_name(tag)) + ", got " + std::string(tag_name(m.tag)));
  }
  return m;
}

TimeStep RemoteEnvironment::next_timestep() {
  TimeStepHeader header = timestep_from_body(expect(Tag::kTimeStep).body);
  return std::move(header).complete(expect(Tag::kFrame).frame);
}

TimeStep RemoteEnvironment::reset() {
  send(Message::make(Tag::kReset));
  return next_timestep();
}

TimeStep RemoteEnvironment::step(std::span<const RawAction> actions) { return step_impl(actions, std::nullopt); }

TimeStep RemoteEnvironment::step_until(std::span<const RawAction> actions, Micros fetch_at) {
  return step_impl(actions, fetch_at);
}

TimeStep RemoteEnvironment::step_impl(std::span<const RawAction> actions, std::optional<Micros> fetch_at) {
  json body{{"actions", std::vector<RawAction>(actions.begin(), actions.end())}};
  if (pending_advance_ > 0) body["advance_us"] = pending_advance_;
  if (fetch_at) body["fetch_at_us"] = *fetch_at;
  pending_advance_ = 0;
  send(Message::make(Tag::kStep, std::move(body)));
  return next_timestep();
}

ExtrasMap RemoteEnvironment::request_extras() {
  send(Message::make(Tag::kExtrasReq));
  return extras_from_json(expect(Tag::kExtras).body.at("extras"));
}

json RemoteEnvironment::control(const std::string& verb, json args) {
  args["verb"] = verb;
  send(Message::make(Tag::kControl, std::move(args)));
  return expect(Tag::kControl).body;
}

std::vector<std::string> RemoteEnvironment::list_tasks() {
  return control("list_tasks").at("tasks").get<std::vector<std::string>>();
}

void RemoteEnvironment::load_task(const std::string& id) {
  control("load_task", {{"id", id}});
  expect(Tag::kSpec);
}

json RemoteEnvironment::spec() {
  send(Message::make(Tag::kSpec));
  return expect(Tag::kSpec).body;
}

}  // namespace touchboard::net
