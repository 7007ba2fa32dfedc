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

#ifndef TOUCHBOARD_TOUCH_HPP_
#define TOUCHBOARD_TOUCH_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include "touchboard/core.hpp"

namespace touchboard {

enum class PointerKind { kDown, kMove, kUp };

// Single-pointer touch stream element. UP carries no position.
struct PointerEvent {
  PointerKind kind = PointerKind::kDown;
  std::optional<Position> position;
  Micros t = 0;

  friend bool operator==(const PointerEvent&, const PointerEvent&) = default;
};

enum class Direction { kUp, kDown, kLeft, kRight };
enum class GestureKind { kTap, kLongPress, kSwipe, kDrag, kScroll };

std::string_view direction_name(Direction direction);
std::string_view gesture_kind_name(GestureKind kind);

// A classified gesture. Which fields are meaningful depends on `kind`:
//   TAP / LONG_PRESS: position
//   SWIPE:            direction, start, end
//   DRAG:             path (every pointer position of the span)
//   SCROLL:           direction, magnitude, position (start of the scroll)
struct GestureEvent {
  GestureKind kind = GestureKind::kTap;
  Micros t = 0;  // emission time
  Position position;
  Direction direction = Direction::kUp;
  Position start;
  Position end;
  std::vector<Position> path;
  double magnitude = 0.0;

  static GestureEvent tap(Position p, Micros t = 0);
  static GestureEvent long_press(Position p, Micros t = 0);
  static GestureEvent swipe(Direction d, Position start, Position end, Micros t = 0);
  static GestureEvent drag(std::vector<Position> path, Micros t = 0);
  static GestureEvent scroll(Direction d, double magnitude, Position start, Micros t = 0);
};

// Thresholds for turning pointer spans into gestures. Times in milliseconds,
// distances in unit-square coordinates.
struct GestureConfig {
  double tap_max_ms = 300.0;
  double long_press_ms = 500.0;
  double tap_slop = 0.02;
  double swipe_min_dist = 0.1;
  double swipe_max_ms = 700.0;
  // Opt-in: aligned drags are reported as SCROLL instead of DRAG.
  bool scroll = false;

  // Throws Error(kSchemaError) when the invariants do not hold.
  void validate() const;

  friend bool operator==(const GestureConfig&, const GestureConfig&) = default;
};

void to_json(nlohmann::json& j, const GestureConfig& cfg);

// TOUCH while up -> DOWN, TOUCH while down -> MOVE, LIFT while down -> UP,
// LIFT while up -> nothing. `action` must already be REPEAT-resolved.
std::optional<PointerEvent> to_pointer(const RawAction& action, bool pointer_is_down, Micros t);

// Streaming classifier. Events must arrive in time order; advance_to() lets a
// long press fire while the pointer is still down.
class GestureRecognizer {
 public:
  explicit GestureRecognizer(GestureConfig cfg = {});

  // Throws Error(kIllegalStream) on an illegal transition or time reversal.
  std::vector<GestureEvent> feed(const PointerEvent& event);
  std::vector<GestureEvent> advance_to(Micros t);

  bool pointer_down() const { return down_; }
  const GestureConfig& config() const { return cfg_; }
  void reset();

 private:
  std::optional<GestureEvent> check_long_press(Micros t);
  GestureEvent close_span(Micros t) const;

  GestureConfig cfg_;
  bool down_ = false;
  bool fired_ = false;
  Micros down_t_ = 0;
  Micros last_t_ = 0;
  bool have_time_ = false;
  double max_displacement_ = 0.0;
  std::vector<Position> path_;
};

// One gesture per DOWN..UP span (a long press fires before its UP).
std::vector<GestureEvent> classify(const std::vector<PointerEvent>& stream,
                                   const GestureConfig& cfg);

struct TimedAction {
  Micros t = 0;
  RawAction action;

  friend bool operator==(const TimedAction&, const TimedAction&) = default;
};

// Raw actions, one per step period, that trace out `gesture`.
// Throws Error(kUnrealizable) when the thresholds cannot be met at this period.
std::vector<TimedAction> synthesize(const GestureEvent& gesture, const GestureConfig& cfg,
                                    Micros step_period);

// Replays timed actions through to_pointer() starting with the pointer up.
std::vector<PointerEvent> pointer_stream(const std::vector<TimedAction>& actions);

}  // namespace touchboard

#endif  // TOUCHBOARD_TOUCH_HPP_
