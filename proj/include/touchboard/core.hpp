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

#ifndef TOUCHBOARD_CORE_HPP_
#define TOUCHBOARD_CORE_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "touchboard/error.hpp"

namespace touchboard {

// All simulation and wall times are integer microseconds.
using Micros = std::int64_t;

inline constexpr Micros kMicrosPerSecond = 1'000'000;

enum class ActionType : int { kTouch = 0, kLift = 1, kRepeat = 2 };

std::string_view action_type_name(ActionType type);

// Screen-relative position. Origin is the top-left corner, x grows to the
// right and y grows downward, matching framebuffer row order.
struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct RawAction {
  ActionType type = ActionType::kLift;
  Position position;

  friend bool operator==(const RawAction&, const RawAction&) = default;
};

enum class Orientation : int {
  kPortrait0 = 0,
  kLandscape90 = 1,
  kPortrait180 = 2,
  kLandscape270 = 3,
};

std::array<float, 4> one_hot(Orientation orientation);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Row-major RGB image, 3 bytes per pixel.
class FrameBuffer {
 public:
  FrameBuffer() = default;
  FrameBuffer(int width, int height, Rgb fill = {});
  FrameBuffer(int width, int height, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  // data().size() == width * height * 3
  bool valid() const;

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb color);
  void fill(Rgb color);

  // Drawing in unit-square coordinates; shapes are clipped to the frame.
  void fill_rect(double x0, double y0, double x1, double y1, Rgb color);
  // Radius is measured in units of the frame width so circles stay round.
  void fill_circle(double cx, double cy, double radius, Rgb color);

  friend bool operator==(const FrameBuffer&, const FrameBuffer&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct Observation {
  FrameBuffer pixels;
  Micros timedelta = 0;  // since the previous observation fetch
  Orientation orientation = Orientation::kPortrait0;
};

enum class StepType : int { kFirst = 0, kMid = 1, kLast = 2 };

std::string_view step_type_name(StepType type);
std::optional<StepType> parse_step_type(std::string_view name);

struct TimeStep {
  StepType step_type = StepType::kFirst;
  double reward = 0.0;
  double discount = 1.0;
  Observation observation;

  bool first() const { return step_type == StepType::kFirst; }
  bool mid() const { return step_type == StepType::kMid; }
  bool last() const { return step_type == StepType::kLast; }
};

using EventPayload = std::variant<double, std::string>;

struct AppEvent {
  Micros timestamp = 0;
  std::string name;
  EventPayload payload = 0.0;

  friend bool operator==(const AppEvent&, const AppEvent&) = default;
};

struct NumericArray {
  std::vector<int> shape;
  std::vector<double> values;

  friend bool operator==(const NumericArray&, const NumericArray&) = default;
};

// One snapshot of an app's numeric state, keyed by extras name.
using ExtrasSnapshot = std::map<std::string, NumericArray>;
// Snapshots accumulated between two explicit requests.
using ExtrasMap = std::map<std::string, std::vector<NumericArray>>;

// Throws Error(kOutOfBounds) unless the position lies in the closed unit square.
void validate_action(const RawAction& action);

// REPEAT takes the previously resolved action. With no history it resolves to
// LIFT at the requested position.
RawAction resolve_repeat(const RawAction& current,
                         const std::optional<RawAction>& last_resolved);

// Seeded generator with platform-independent helpers. The standard
// distributions are implementation-defined, so the few draws the apps need are
// derived directly from the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n);

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::mt19937_64 engine_;
};

// Canonical JSON forms used in logs, recordings and on the wire.
void to_json(nlohmann::json& j, const RawAction& action);
void from_json(const nlohmann::json& j, RawAction& action);
void to_json(nlohmann::json& j, const NumericArray& array);
void from_json(const nlohmann::json& j, NumericArray& array);
void to_json(nlohmann::json& j, const AppEvent& event);

}  // namespace touchboard

#endif  // TOUCHBOARD_CORE_HPP_
