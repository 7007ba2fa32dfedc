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

#ifndef TOUCHBOARD_PROTOCOL_HPP_
#define TOUCHBOARD_PROTOCOL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "touchboard/core.hpp"

namespace touchboard::net {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint16_t kDefaultPort = 8397;
inline constexpr std::size_t kMaxPayload = 16u << 20;

enum class Tag : std::uint8_t {
  kHello = 0,
  kSpec = 1,
  kReset = 2,
  kStep = 3,
  kTimeStep = 4,
  kExtrasReq = 5,
  kExtras = 6,
  kControl = 7,
  kError = 8,
  kFrame = 9,
};

std::string_view tag_name(Tag tag);
std::optional<Tag> parse_tag_name(std::string_view name);

// FRAME carries binary pixels instead of JSON: a 4-byte big-endian frame id
// followed by width * height * 3 RGB bytes.
struct FramePayload {
  std::uint32_t id = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const FramePayload&, const FramePayload&) = default;
};

struct Message {
  Tag tag = Tag::kHello;
  nlohmann::json body = nlohmann::json::object();  // every tag but FRAME
  FramePayload frame;                              // FRAME only

  static Message make(Tag tag, nlohmann::json body = nlohmann::json::object());
  static Message make_frame(std::uint32_t id, std::vector<std::uint8_t> rgb);
  static Message error(ErrorCode code, const std::string& message);

  friend bool operator==(const Message&, const Message&) = default;
};

// Binary framing: u32 big-endian payload length, then tag byte and body.
std::vector<std::uint8_t> encode(const Message& m);

// Decodes one payload (tag byte plus body) without the length prefix.
// Throws Error with kUnknownTag or kMalformedBody.
Message decode_payload(std::span<const std::uint8_t> payload);

// Incremental decoder for a byte stream. Bytes go in as they arrive; whole
// messages come out. A length over kMaxPayload throws kFrameTooLarge and
// leaves the decoder unusable, since the stream can no longer be framed. A
// bad tag or body throws after consuming that frame, so decoding can go on.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<Message> next();
  std::size_t buffered() const { return buffer_.size() - read_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t read_ = 0;
  bool broken_ = false;
};

// Text framing for browser sockets: {"tag": "STEP", "body": {...}}. FRAME
// bodies become {"id": n, "data": "<base64 RGB>"}.
std::string encode_text(const Message& m);
Message decode_text(std::string_view text);  // kUnknownTag, kMalformedBody

// --- message bodies shared by server and client ------------------------------

nlohmann::json timestep_body(const TimeStep& ts, std::uint32_t frame_id);

// A TIMESTEP body: everything but the pixels, which travel in the next FRAME.
struct TimeStepHeader {
  TimeStep timestep;  // pixels left empty
  int width = 0;
  int height = 0;
  std::uint32_t frame_id = 0;

  // Attaches the pixels of the matching FRAME. Throws kMalformedBody.
  TimeStep complete(const FramePayload& frame) &&;
};

TimeStepHeader timestep_from_body(const nlohmann::json& body);

nlohmann::json extras_to_json(const ExtrasMap& extras);
ExtrasMap extras_from_json(const nlohmann::json& j);

}  // namespace touchboard::net

#endif  // TOUCHBOARD_PROTOCOL_HPP_
