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

#include "touchboard/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace touchboard {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kInvalidAction: return "InvalidAction";
    case ErrorCode::kNotStarted: return "NotStarted";
    case ErrorCode::kTaskLoadError: return "TaskLoadError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownApp: return "UnknownApp";
    case ErrorCode::kUnknownTask: return "UnknownTask";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIllegalStream: return "IllegalStream";
    case ErrorCode::kUnrealizable: return "Unrealizable";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kFrameTooLarge: return "FrameTooLarge";
    case ErrorCode::kUnknownTag: return "UnknownTag";
    case ErrorCode::kMalformedBody: return "MalformedBody";
    case ErrorCode::kSessionBusy: return "SessionBusy";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kMissingExtras: return "MissingExtras";
    case ErrorCode::kDegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kHandshakeRequired: return "HandshakeRequired";
    case ErrorCode::kReplayMismatch: return "ReplayMismatch";
  }
  return "Unknown";
}

std::optional<ErrorCode> parse_error_code(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::kReplayMismatch); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (error_code_name(code) == name) return code;
  }
  return std::nullopt;
}

std::string_view action_type_name(ActionType type) {
  switch (type) {
    case ActionType::kTouch: return "TOUCH";
    case ActionType::kLift: return "LIFT";
    case ActionType::kRepeat: return "REPEAT";
  }
  return "?";
}

std::string_view step_type_name(StepType type) {
  switch (type) {
    case StepType::kFirst: return "FIRST";
    case StepType::kMid: return "MID";
    case StepType::kLast: return "LAST";
  }
  return "?";
}

std::optional<StepType> parse_step_type(std::string_view name) {
  for (StepType t : {StepType::kFirst, StepType::kMid, StepType::kLast}) {
    if (step_type_name(t) == name) return t;
  }
  return std::nullopt;
}

std::array<float, 4> one_hot(Orientation orientation) {
  std::array<float, 4> v{};
  v[static_cast<std::size_t>(orientation)] = 1.0f;
  return v;
}

FrameBuffer::FrameBuffer(int width, int height, Rgb fill_color)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame dimensions must be positive");
  }
  data_.resize(static_cast<std::size_t>(width) * height * 3);
  fill(fill_color);
}

FrameBuffer::FrameBuffer(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0 || !valid()) {
    throw Error(ErrorCode::kInvalidArgument, "frame data does not match dimensions");
  }
}

bool FrameBuffer::valid() const {
  return data_.size() == static_cast<std::size_t>(width_) * height_ * 3;
}

Rgb FrameBuffer::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void FrameBuffer::set(int x, int y, Rgb color) {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  data_[i] = color.r;
  data_[i + 1] = color.g;
  data_[i + 2] = color.b;
}

void FrameBuffer::fill(Rgb color) {
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = color.r;
    data_[i + 1] = color.g;
    data_[i + 2] = color.b;
  }
}

void FrameBuffer::fill_rect(double x0, double y0, double x1, double y1, Rgb color) {
  const int px0 = std::clamp(static_cast<int>(std::lround(x0 * width_)), 0, width_);
  const int px1 = std::clamp(static_cast<int>(std::lround(x1 * width_)), 0, width_);
  const int py0 = std::clamp(static_cast<int>(std::lround(y0 * height_)), 0, height_);
  const int py1 = std::clamp(static_cast<int>(std::lround(y1 * height_)), 0, height_);
  for (int y = py0; y < py1; ++y) {
    for (int x = px0; x < px1; ++x) set(x, y, color);
  }
}

void FrameBuffer::fill_circle(double cx, double cy, double radius, Rgb color) {
  const double pcx = cx * width_;
  const double pcy = cy * height_;
  const double pr = radius * width_;
  const int x0 = std::max(0, static_cast<int>(std::floor(pcx - pr)));
  const int x1 = std::min(width_ - 1, static_cast<int>(std::ceil(pcx + pr)));
  const int y0 = std::max(0, static_cast<int>(std::floor(pcy - pr)));
  const int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(pcy + pr)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - pcx;
      const double dy = y + 0.5 - pcy;
      if (dx * dx + dy * dy <= pr * pr) set(x, y, color);
    }
  }
}

void validate_action(const RawAction& action) {
  const auto inside = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!inside(action.position.x) || !inside(action.position.y)) {
    std::ostringstream msg;
    msg << "position (" << action.position.x << ", " << action.position.y
        << ") is outside the unit square";
    throw Error(ErrorCode::kOutOfBounds, msg.str());
  }
  const int type = static_cast<int>(action.type);
  if (type < 0 || type > 2) {
    throw Error(ErrorCode::kInvalidAction, "unknown action type " + std::to_string(type));
  }
}

RawAction resolve_repeat(const RawAction& current,
                         const std::optional<RawAction>& last_resolved) {
  if (current.type != ActionType::kRepeat) return current;
  if (last_resolved) return *last_resolved;
  return {ActionType::kLift, current.position};
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

void to_json(nlohmann::json& j, const RawAction& action) {
  j = nlohmann::json{{"type", static_cast<int>(action.type)},
                     {"x", action.position.x},
                     {"y", action.position.y}};
}

void from_json(const nlohmann::json& j, RawAction& action) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_number_integer()) {
    throw Error(ErrorCode::kMalformedBody, "action needs an integer \"type\"");
  }
  const int type = j.at("type").get<int>();
  if (type < 0 || type > 2) {
    throw Error(ErrorCode::kInvalidAction, "unknown action type " + std::to_string(type));
  }
  action.type = static_cast<ActionType>(type);
  action.position.x = j.value("x", 0.0);
  action.position.y = j.value("y", 0.0);
}

void to_json(nlohmann::json& j, const NumericArray& array) {
  j = nlohmann::json{{"shape", array.shape}, {"values", array.values}};
}

void from_json(const nlohmann::json& j, NumericArray& array) {
  array.shape = j.at("shape").get<std::vector<int>>();
  array.values = j.at("values").get<std::vector<double>>();
}

void to_json(nlohmann::json& j, const AppEvent& event) {
  j = nlohmann::json{{"t", event.timestamp}, {"name", event.name}};
  std::visit([&j](const auto& v) { j["payload"] = v; }, event.payload);
}

}  // namespace touchboard
