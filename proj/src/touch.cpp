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

#include "touchboard/touch.hpp"

#include <algorithm>
#include <cmath>

namespace touchboard {
namespace {

Micros ms_to_us(double ms) { return static_cast<Micros>(std::llround(ms * 1000.0)); }

double distance(Position a, Position b) { return std::hypot(b.x - a.x, b.y - a.y); }

bool in_unit_square(Position p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

// |dx| >= |dy| counts as horizontal.
Direction dominant_direction(Position from, Position to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (std::abs(dx) >= std::abs(dy)) return dx < 0 ? Direction::kLeft : Direction::kRight;
  return dy < 0 ? Direction::kUp : Direction::kDown;
}

Position unit_step(Direction d) {
  switch (d) {
    case Direction::kUp: return {0.0, -1.0};
    case Direction::kDown: return {0.0, 1.0};
    case Direction::kLeft: return {-1.0, 0.0};
    case Direction::kRight: return {1.0, 0.0};
  }
  return {};
}

bool horizontal(Direction d) { return d == Direction::kLeft || d == Direction::kRight; }

[[noreturn]] void unrealizable(const std::string& why) {
  throw Error(ErrorCode::kUnrealizable, why);
}

}  // namespace

std::string_view direction_name(Direction direction) {
  switch (direction) {
    case Direction::kUp: return "UP";
    case Direction::kDown: return "DOWN";
    case Direction::kLeft: return "LEFT";
    case Direction::kRight: return "RIGHT";
  }
  return "?";
}

std::string_view gesture_kind_name(GestureKind kind) {
  switch (kind) {
    case GestureKind::kTap: return "TAP";
    case GestureKind::kLongPress: return "LONG_PRESS";
    case GestureKind::kSwipe: return "SWIPE";
    case GestureKind::kDrag: return "DRAG";
    case GestureKind::kScroll: return "SCROLL";
  }
  return "?";
}

GestureEvent GestureEvent::tap(Position p, Micros t) {
  GestureEvent g;
  g.kind = GestureKind::kTap;
  g.t = t;
  g.position = p;
  return g;
}

GestureEvent GestureEvent::long_press(Position p, Micros t) {
  GestureEvent g = tap(p, t);
  g.kind = GestureKind::kLongPress;
  return g;
}

GestureEvent GestureEvent::swipe(Direction d, Position start, Position end, Micros t) {
  GestureEvent g;
  g.kind = GestureKind::kSwipe;
  g.t = t;
  g.direction = d;
  g.start = start;
  g.end = end;
  g.position = start;
  return g;
}

GestureEvent GestureEvent::drag(std::vector<Position> path, Micros t) {
  GestureEvent g;
  g.kind = GestureKind::kDrag;
  g.t = t;
  if (!path.empty()) {
    g.start = path.front();
    g.end = path.back();
    g.position = path.front();
  }
  g.path = std::move(path);
  return g;
}

GestureEvent GestureEvent::scroll(Direction d, double magnitude, Position start, Micros t) {
  GestureEvent g;
  g.kind = GestureKind::kScroll;
  g.t = t;
  g.direction = d;
  g.magnitude = magnitude;
  g.position = start;
  g.start = start;
  return g;
}

void GestureConfig::validate() const {
  if (!(tap_max_ms > 0.0) || !(long_press_ms > 0.0) || !(swipe_max_ms > 0.0)) {
    throw Error(ErrorCode::kSchemaError, "gesture times must be positive");
  }
  if (!(tap_max_ms < long_press_ms)) {
    throw Error(ErrorCode::kSchemaError, "tap_max_ms must be below long_press_ms");
  }
  const auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(tap_slop) || !open_unit(swipe_min_dist)) {
    throw Error(ErrorCode::kSchemaError, "gesture distances must lie in (0, 1)");
  }
}

void to_json(nlohmann::json& j, const GestureConfig& cfg) {
  j = nlohmann::json{{"tap_max_ms", cfg.tap_max_ms},         {"long_press_ms", cfg.long_press_ms},
                     {"tap_slop", cfg.tap_slop},             {"swipe_min_dist", cfg.swipe_min_dist},
                     {"swipe_max_ms", cfg.swipe_max_ms},     {"scroll", cfg.scroll}};
}

std::optional<PointerEvent> to_pointer(const RawAction& action, bool pointer_is_down, Micros t) {
  switch (action.type) {
    case ActionType::kTouch:
      return PointerEvent{pointer_is_down ? PointerKind::kMove : PointerKind::kDown,
                          action.position, t};
    case ActionType::kLift:
      if (!pointer_is_down) return std::nullopt;
      return PointerEvent{PointerKind::kUp, std::nullopt, t};
    case ActionType::kRepeat:
      break;
  }
  throw Error(ErrorCode::kInvalidAction, "REPEAT must be resolved before delivery");
}

GestureRecognizer::GestureRecognizer(GestureConfig cfg) : cfg_(cfg) {}

void GestureRecognizer::reset() {
  down_ = false;
  fired_ = false;
  down_t_ = 0;
  last_t_ = 0;
  have_time_ = false;
  max_displacement_ = 0.0;
  path_.clear();
}

std::optional<GestureEvent> GestureRecognizer::check_long_press(Micros t) {
  if (!down_ || fired_) return std::nullopt;
  if (t - down_t_ >= ms_to_us(cfg_.long_press_ms) && max_displacement_ < cfg_.tap_slop) {
    fired_ = true;
    return GestureEvent::long_press(path_.front(), t);
  }
  return std::nullopt;
}

std::vector<GestureEvent> GestureRecognizer::advance_to(Micros t) {
  if (have_time_ && t < last_t_) {
    throw Error(ErrorCode::kIllegalStream, "time moved backwards");
  }
  last_t_ = t;
  have_time_ = true;
  std::vector<GestureEvent> out;
  if (auto g = check_long_press(t)) out.push_back(std::move(*g));
  return out;
}

std::vector<GestureEvent> GestureRecognizer::feed(const PointerEvent& event) {
  if (have_time_ && event.t < last_t_) {
    throw Error(ErrorCode::kIllegalStream, "pointer events out of time order");
  }
  switch (event.kind) {
    case PointerKind::kDown:
      if (down_) throw Error(ErrorCode::kIllegalStream, "DOWN while the pointer is down");
      if (!event.position) throw Error(ErrorCode::kIllegalStream, "DOWN without a position");
      break;
    case PointerKind::kMove:
      if (!down_) throw Error(ErrorCode::kIllegalStream, "MOVE while the pointer is up");
      if (!event.position) throw Error(ErrorCode::kIllegalStream, "MOVE without a position");
      break;
    case PointerKind::kUp:
      if (!down_) throw Error(ErrorCode::kIllegalStream, "UP while the pointer is up");
      break;
  }
  last_t_ = event.t;
  have_time_ = true;

  std::vector<GestureEvent> out;
  // The threshold may have passed before this event moved the pointer.
  if (auto g = check_long_press(event.t)) out.push_back(std::move(*g));

  switch (event.kind) {
    case PointerKind::kDown:
      down_ = true;
      fired_ = false;
      down_t_ = event.t;
      max_displacement_ = 0.0;
      path_.assign(1, *event.position);
      break;
    case PointerKind::kMove:
      path_.push_back(*event.position);
      max_displacement_ = std::max(max_displacement_, distance(path_.front(), *event.position));
      break;
    case PointerKind::kUp:
      if (!fired_) out.push_back(close_span(event.t));
      down_ = false;
      fired_ = false;
      path_.clear();
      break;
  }
  return out;
}

GestureEvent GestureRecognizer::close_span(Micros t) const {
  const Micros duration = t - down_t_;
  const Position start = path_.front();
  const Position end = path_.back();
  if (max_displacement_ < cfg_.tap_slop) {
    if (duration < ms_to_us(cfg_.tap_max_ms)) return GestureEvent::tap(start, t);
    if (duration >= ms_to_us(cfg_.long_press_ms)) return GestureEvent::long_press(start, t);
    return GestureEvent::drag(path_, t);
  }
  if (distance(start, end) >= cfg_.swipe_min_dist && duration <= ms_to_us(cfg_.swipe_max_ms)) {
    return GestureEvent::swipe(dominant_direction(start, end), start, end, t);
  }
  if (cfg_.scroll) {
    const Direction d = dominant_direction(start, end);
    const bool aligned = std::all_of(path_.begin(), path_.end(), [&](Position p) {
      const double off = horizontal(d) ? std::abs(p.y - start.y) : std::abs(p.x - start.x);
      return off < cfg_.tap_slop;
    });
    if (aligned) {
      const double along = horizontal(d) ? std::abs(end.x - start.x) : std::abs(end.y - start.y);
      return GestureEvent::scroll(d, along, start, t);
    }
  }
  return GestureEvent::drag(path_, t);
}

std::vector<GestureEvent> classify(const std::vector<PointerEvent>& stream,
                                   const GestureConfig& cfg) {
  GestureRecognizer recognizer(cfg);
  std::vector<GestureEvent> out;
  for (const PointerEvent& e : stream) {
    for (GestureEvent& g : recognizer.feed(e)) out.push_back(std::move(g));
  }
  return out;
}

std::vector<PointerEvent> pointer_stream(const std::vector<TimedAction>& actions) {
  std::vector<PointerEvent> out;
  bool down = false;
  for (const TimedAction& ta : actions) {
    if (auto e = to_pointer(ta.action, down, ta.t)) {
      down = e->kind != PointerKind::kUp;
      out.push_back(*e);
    }
  }
  return out;
}

std::vector<TimedAction> synthesize(const GestureEvent& gesture, const GestureConfig& cfg,
                                    Micros step_period) {
  if (step_period <= 0) throw Error(ErrorCode::kInvalidArgument, "step period must be positive");
  const Micros tap_max = ms_to_us(cfg.tap_max_ms);
  const Micros long_press = ms_to_us(cfg.long_press_ms);
  const Micros swipe_max = ms_to_us(cfg.swipe_max_ms);

  // Touches at consecutive step boundaries followed by one LIFT.
  const auto trace = [step_period](const std::vector<Position>& points) {
    std::vector<TimedAction> out;
    Micros t = 0;
    for (const Position& p : points) {
      out.push_back({t, {ActionType::kTouch, p}});
      t += step_period;
    }
    out.push_back({t, {ActionType::kLift, points.back()}});
    return out;
  };

  switch (gesture.kind) {
    case GestureKind::kTap: {
      if (!in_unit_square(gesture.position)) unrealizable("tap outside the screen");
      if (step_period >= tap_max) unrealizable("step period is not shorter than tap_max_ms");
      return trace({gesture.position});
    }

    case GestureKind::kLongPress: {
      if (!in_unit_square(gesture.position)) unrealizable("long press outside the screen");
      // Hold until the LIFT lands at or after the threshold.
      const Micros holds = std::max<Micros>(1, (long_press + step_period - 1) / step_period);
      return trace(std::vector<Position>(static_cast<std::size_t>(holds), gesture.position));
    }

    case GestureKind::kSwipe: {
      const Position a = gesture.start;
      const Position b = gesture.end;
      if (!in_unit_square(a) || !in_unit_square(b)) unrealizable("swipe leaves the screen");
      const double length = distance(a, b);
      if (length < cfg.swipe_min_dist || length < cfg.tap_slop) {
        unrealizable("swipe is shorter than swipe_min_dist");
      }
      if (dominant_direction(a, b) != gesture.direction) {
        unrealizable("swipe endpoints disagree with its direction");
      }
      if (step_period >= long_press) unrealizable("first move would come after a long press");
      const Position mid{(a.x + b.x) / 2.0, (a.y + b.y) / 2.0};
      // Three aligned touches when they fit, else start and end only.
      if (3 * step_period <= swipe_max && (length / 2.0 >= cfg.tap_slop || 2 * step_period < long_press)) {
        return trace({a, mid, b});
      }
      if (2 * step_period <= swipe_max) return trace({a, b});
      unrealizable("two step periods exceed swipe_max_ms");
    }

    case GestureKind::kDrag: {
      std::vector<Position> path = gesture.path;
      if (path.size() < 2) unrealizable("drag needs at least two points");
      for (const Position& p : path) {
        if (!in_unit_square(p)) unrealizable("drag leaves the screen");
      }
      // The pointer must leave the slop region before a long press can fire.
      std::size_t first_out = 0;
      for (std::size_t i = 1; i < path.size(); ++i) {
        if (distance(path.front(), path[i]) >= cfg.tap_slop) {
          first_out = i;
          break;
        }
      }
      if (first_out == 0) unrealizable("drag never leaves tap_slop");
      if (static_cast<Micros>(first_out) * step_period >= long_press) {
        unrealizable("drag leaves tap_slop only after long_press_ms");
      }
      // Hold at the end long enough that the span cannot read as a swipe.
      if (distance(path.front(), path.back()) >= cfg.swipe_min_dist) {
        const auto needed = static_cast<std::size_t>(swipe_max / step_period + 1);
        while (path.size() < needed) path.push_back(path.back());
      }
      if (cfg.scroll) {
        const Direction d = dominant_direction(path.front(), path.back());
        const bool aligned = std::all_of(path.begin(), path.end(), [&](Position p) {
          const double off =
              horizontal(d) ? std::abs(p.y - path.front().y) : std::abs(p.x - path.front().x);
          return off < cfg.tap_slop;
        });
        if (aligned) unrealizable("aligned drag reads as a scroll when scrolling is enabled");
      }
      return trace(path);
    }

    case GestureKind::kScroll: {
      if (!cfg.scroll) unrealizable("scroll recognition is disabled in this config");
      const Position start = gesture.position;
      const Position dir = unit_step(gesture.direction);
      const Position end{start.x + dir.x * gesture.magnitude, start.y + dir.y * gesture.magnitude};
      if (!in_unit_square(start) || !in_unit_square(end)) unrealizable("scroll leaves the screen");
      if (step_period >= long_press) unrealizable("first move would come after a long press");
      // Enough touches that the span outlasts swipe_max_ms.
      const auto touches = std::max<std::size_t>(2, static_cast<std::size_t>(swipe_max / step_period + 1));
      const double first = std::min(gesture.magnitude,
                                    std::max(gesture.magnitude / static_cast<double>(touches - 1),
                                             1.5 * cfg.tap_slop));
      if (first < 1.0001 * cfg.tap_slop) unrealizable("scroll magnitude is within tap_slop");
      std::vector<Position> points{start};
      for (std::size_t i = 1; i < touches; ++i) {
        const double frac = touches == 2 ? 1.0 : static_cast<double>(i - 1) / static_cast<double>(touches - 2);
        const double d = first + (gesture.magnitude - first) * frac;
        points.push_back({start.x + dir.x * d, start.y + dir.y * d});
      }
      return trace(points);
    }
  }
  unrealizable("unknown gesture kind");
}

}  // namespace touchboard
