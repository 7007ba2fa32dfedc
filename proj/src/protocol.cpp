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

#include "touchboard/protocol.hpp"

#include <boost/beast/core/detail/base64.hpp>

#include <algorithm>
#include <cctype>

namespace touchboard::net {

using nlohmann::json;

namespace {

constexpr std::string_view kTagNames[] = {"HELLO",  "SPEC",   "RESET",   "STEP",  "TIMESTEP",
                                          "EXTRAS_REQ", "EXTRAS", "CONTROL", "ERROR", "FRAME"};
constexpr int kTagCount = 10;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json parse_body(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedBody, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kMalformedBody, "message body must be a JSON object");
  return j;
}

Tag checked_tag(std::uint8_t raw) {
  if (raw >= kTagCount) throw Error(ErrorCode::kUnknownTag, "tag " + std::to_string(raw));
  return static_cast<Tag>(raw);
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  namespace b64 = boost::beast::detail::base64;
  // The decoder stops quietly at the first bad character; reject those here.
  const std::size_t body = text.find_last_not_of('=') + 1;
  const bool padded = text.size() % 4 == 0 && text.size() - body <= 2;
  const bool alphabet = std::all_of(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(body), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '/';
  });
  if (!padded || !alphabet) throw Error(ErrorCode::kMalformedBody, "invalid base64 frame data");
  std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
  const std::size_t written = b64::decode(out.data(), text.data(), text.size()).first;
  out.resize(written);
  return out;
}

}  // namespace

std::string_view tag_name(Tag tag) {
  const auto i = static_cast<std::size_t>(tag);
  return i < kTagCount ? kTagNames[i] : "?";
}

std::optional<Tag> parse_tag_name(std::string_view name) {
  for (int i = 0; i < kTagCount; ++i) {
    if (kTagNames[i] == name) return static_cast<Tag>(i);
  }
  return std::nullopt;
}

Message Message::make(Tag tag, json body) {
  Message m;
  m.tag = tag;
  m.body = std::move(body);
  return m;
}

Message Message::make_frame(std::uint32_t id, std::vector<std::uint8_t> rgb) {
  Message m;
  m.tag = Tag::kFrame;
  m.frame = {id, std::move(rgb)};
  return m;
}

Message Message::error(ErrorCode code, const std::string& message) {
  return make(Tag::kError, {{"code", std::string(error_code_name(code))}, {"message", message}});
}

std::vector<std::uint8_t> encode(const Message& m) {
  std::vector<std::uint8_t> out;
  if (m.tag == Tag::kFrame) {
    const std::size_t payload = 1 + 4 + m.frame.rgb.size();
    if (payload > kMaxPayload) throw Error(ErrorCode::kFrameTooLarge, "frame exceeds 16 MiB");
    out.reserve(4 + payload);
    put_u32(out, static_cast<std::uint32_t>(payload));
    out.push_back(static_cast<std::uint8_t>(m.tag));
    put_u32(out, m.frame.id);
    out.insert(out.end(), m.frame.rgb.begin(), m.frame.rgb.end());
    return out;
  }
  const std::string body = dump(m.body);
  const std::size_t payload = 1 + body.size();
  if (payload > kMaxPayload) throw Error(ErrorCode::kFrameTooLarge, "message exceeds 16 MiB");
  out.reserve(4 + payload);
  put_u32(out, static_cast<std::uint32_t>(payload));
  out.push_back(static_cast<std::uint8_t>(m.tag));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Message decode_payload(std::span<const std::uint8_t> payload) {
  if (payload.empty()) throw Error(ErrorCode::kMalformedBody, "empty payload");
  Message m;
  m.tag = checked_tag(payload[0]);
  if (m.tag == Tag::kFrame) {
    if (payload.size() < 5) throw Error(ErrorCode::kMalformedBody, "FRAME needs a 4-byte id");
    m.frame.id = get_u32(payload.data() + 1);
    m.frame.rgb.assign(payload.begin() + 5, payload.end());
    return m;
  }
  m.body = parse_body({reinterpret_cast<const char*>(payload.data()) + 1, payload.size() - 1});
  return m;
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  if (read_ > 0 && read_ == buffer_.size()) {
    buffer_.clear();
    read_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Message> FrameDecoder::next() {
  if (broken_) throw Error(ErrorCode::kFrameTooLarge, "stream is no longer framed");
  if (buffer_.size() - read_ < 4) return std::nullopt;
  const std::uint32_t length = get_u32(buffer_.data() + read_);
  if (length > kMaxPayload) {
    broken_ = true;
    throw Error(ErrorCode::kFrameTooLarge, "payload of " + std::to_string(length) + " bytes");
  }
  if (buffer_.size() - read_ < 4 + std::size_t{length}) return std::nullopt;
  const std::span<const std::uint8_t> payload(buffer_.data() + read_ + 4, length);
  read_ += 4 + std::size_t{length};
  Message m = decode_payload(payload);
  // Compact once the consumed prefix dominates the buffer.
  if (read_ > 4096 && read_ * 2 > buffer_.size()) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(read_));
    read_ = 0;
  }
  return m;
}

std::string encode_text(const Message& m) {
  json j;
  j["tag"] = std::string(tag_name(m.tag));
  if (m.tag == Tag::kFrame) {
    j["body"] = {{"id", m.frame.id}, {"data", base64_encode(m.frame.rgb)}};
  } else {
    j["body"] = m.body;
  }
  return dump(j);
}

Message decode_text(std::string_view text) {
  const json j = parse_body(text);
  const auto tag = j.find("tag");
  if (tag == j.end() || !tag->is_string()) throw Error(ErrorCode::kMalformedBody, "missing \"tag\"");
  const auto parsed = parse_tag_name(tag->get<std::string>());
  if (!parsed) throw Error(ErrorCode::kUnknownTag, "tag '" + tag->get<std::string>() + "'");
  Message m;
  m.tag = *parsed;
  json body = j.value("body", json::object());
  if (!body.is_object()) throw Error(ErrorCode::kMalformedBody, "message body must be a JSON object");
  if (m.tag == Tag::kFrame) {
    const auto id = body.find("id");
    const auto data = body.find("data");
    if (id == body.end() || !id->is_number_unsigned() || data == body.end() || !data->is_string()) {
      throw Error(ErrorCode::kMalformedBody, "FRAME needs id and data");
    }
    m.frame.id = id->get<std::uint32_t>();
    m.frame.rgb = base64_decode(data->get<std::string>());
  } else {
    m.body = std::move(body);
  }
  return m;
}

json timestep_body(const TimeStep& ts, std::uint32_t frame_id) {
  return {{"step_type", std::string(step_type_name(ts.step_type))},
          {"reward", ts.reward},
          {"discount", ts.discount},
          {"timedelta_us", ts.observation.timedelta},
          {"orientation", static_cast<int>(ts.observation.orientation)},
          {"width", ts.observation.pixels.width()},
          {"height", ts.observation.pixels.height()},
          {"frame_id", frame_id}};
}

TimeStepHeader timestep_from_body(const json& body) {
  try {
    TimeStepHeader h;
    TimeStep& ts = h.timestep;
    const auto type = parse_step_type(body.at("step_type").get<std::string>());
    if (!type) throw Error(ErrorCode::kMalformedBody, "unknown step_type");
    ts.step_type = *type;
    ts.reward = body.at("reward").get<double>();
    ts.discount = body.at("discount").get<double>();
    ts.observation.timedelta = body.at("timedelta_us").get<Micros>();
    ts.observation.orientation = static_cast<Orientation>(body.at("orientation").get<int>() & 3);
    h.width = body.at("width").get<int>();
    h.height = body.at("height").get<int>();
    h.frame_id = body.at("frame_id").get<std::uint32_t>();
    return h;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedBody, std::string("TIMESTEP: ") + e.what());
  }
}

TimeStep TimeStepHeader::complete(const FramePayload& frame) && {
  if (frame.id != frame_id) {
    throw Error(ErrorCode::kMalformedBody,
                "FRAME " + std::to_string(frame.id) + " does not follow TIMESTEP " + std::to_string(frame_id));
  }
  try {
    timestep.observation.pixels = FrameBuffer(width, height, frame.rgb);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedBody, e.detail());
  }
  return std::move(timestep);
}

json extras_to_json(const ExtrasMap& extras) {
  json j = json::object();
  for (const auto& [key, arrays] : extras) j[key] = arrays;
  return j;
}

ExtrasMap extras_from_json(const json& j) {
  try {
    ExtrasMap out;
    for (const auto& [key, arrays] : j.items()) out[key] = arrays.get<std::vector<NumericArray>>();
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedBody, std::string("EXTRAS: ") + e.what());
  }
}

}  // namespace touchboard::net
