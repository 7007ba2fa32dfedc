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

#ifndef TOUCHBOARD_APPS_HPP_
#define TOUCHBOARD_APPS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "touchboard/core.hpp"
#include "touchboard/touch.hpp"

namespace touchboard {

// A touchscreen app driven by the engine's tick path. State changes only
// through reseed(), the handlers and update(); render() and extras() are pure.
class App {
 public:
  virtual ~App() = default;

  virtual std::string_view id() const = 0;
  // Relaunch: discard all state and start over from `seed`.
  virtual void reseed(std::uint64_t seed) = 0;
  virtual void handle_pointer(const PointerEvent& /*event*/) {}
  virtual void handle_gesture(const GestureEvent& /*gesture*/) {}
  virtual void update(Micros dt) = 0;
  virtual void render(FrameBuffer& into) const = 0;
  virtual ExtrasSnapshot extras() const = 0;

  // Simulation time stamped onto emitted events.
  void set_time(Micros t) { now_ = t; }
  Micros time() const { return now_; }

  std::vector<AppEvent> drain_events();
  void clear_events() { log_.clear(); }

 protected:
  void emit(std::string name, EventPayload payload);
  void emit_all(std::vector<AppEvent> events);

 private:
  Micros now_ = 0;
  std::vector<AppEvent> log_;
};

using AppFactory = std::function<std::unique_ptr<App>()>;

// Registry keyed by app id. The four built-in apps are always present.
std::unique_ptr<App> make_app(std::string_view id);
bool app_registered(std::string_view id);
std::vector<std::string> registered_apps();
void register_app(std::string id, AppFactory factory);

// --- catch -----------------------------------------------------------------

struct CatchParams {
  double ball_speed = 0.35;  // units per second
  double paddle_row = 0.9;
  double paddle_half_width = 0.1;
  double ball_radius = 0.03;
};

struct CatchState {
  CatchParams params;
  Position ball{0.5, 0.0};
  double paddle_x = 0.5;
  Rng rng;
};

CatchState catch_new(std::uint64_t seed, CatchParams params = {});

// Moves the ball down by speed * dt. On reaching the paddle row it scores +1
// when caught and -1 otherwise, then respawns at the top at a random x.
std::vector<AppEvent> catch_update(CatchState& state, Micros dt, Micros now);

class CatchApp final : public App {
 public:
  explicit CatchApp(CatchParams params = {});

  std::string_view id() const override { return "catch"; }
  void reseed(std::uint64_t seed) override;
  void handle_pointer(const PointerEvent& event) override;
  void update(Micros dt) override;
  void render(FrameBuffer& into) const override;
  ExtrasSnapshot extras() const override;

  const CatchState& state() const { return state_; }

 private:
  CatchParams params_;
  CatchState state_;
};

// --- press_button ----------------------------------------------------------

struct ButtonState {
  Position center{0.5, 0.5};
  static constexpr double kWidth = 0.2;
  static constexpr double kHeight = 0.1;
  Rng rng;

  bool contains(Position p) const;
};

ButtonState button_new(std::uint64_t seed);

// Only a TAP inside the button scores; the button then jumps elsewhere.
std::vector<AppEvent> button_handle(const GestureEvent& gesture, ButtonState& state, Micros now);

class ButtonApp final : public App {
 public:
  std::string_view id() const override { return "press_button"; }
  void reseed(std::uint64_t seed) override;
  void handle_gesture(const GestureEvent& gesture) override;
  void update(Micros) override {}
  void render(FrameBuffer& into) const override;
  ExtrasSnapshot extras() const override;

  const ButtonState& state() const { return state_; }

 private:
  ButtonState state_;
};

// --- slide_2048 ------------------------------------------------------------

// Tile exponents: 0 is empty, e > 0 is a tile of value 2^e.
using Line4 = std::array<int, 4>;

struct MergeResult {
  Line4 line{};
  std::int64_t score = 0;

  friend bool operator==(const MergeResult&, const MergeResult&) = default;
};

// Compacts toward index 0 and merges equal neighbours once, head first.
MergeResult merge_line(const Line4& line);

struct Board2048 {
  std::array<Line4, 4> cells{};  // cells[row][col]
  Rng rng;

  std::int64_t tile_sum() const;
  bool operator==(const Board2048& other) const { return cells == other.cells; }
};

Board2048 board_new(std::uint64_t seed);
bool board_has_move(const Board2048& board);
// Exponent 1 with probability 0.9, else 2, in a uniformly chosen empty cell.
void board_spawn(Board2048& board);

std::vector<AppEvent> board_apply_swipe(Board2048& board, Direction dir, Micros now);

class Slide2048App final : public App {
 public:
  std::string_view id() const override { return "slide_2048"; }
  void reseed(std::uint64_t seed) override;
  void handle_gesture(const GestureEvent& gesture) override;
  void update(Micros) override {}
  void render(FrameBuffer& into) const override;
  ExtrasSnapshot extras() const override;

  const Board2048& board() const { return board_; }

 private:
  Board2048 board_;
};

// --- drag_match ------------------------------------------------------------

struct DragMatchState {
  static constexpr double kTokenRadius = 0.06;
  static constexpr double kZoneHalf = 0.1;

  Position token{0.3, 0.3};
  Position home{0.3, 0.3};
  Position target{0.7, 0.7};
  bool attached = false;
  Position grab_offset;
  int successes = 0;
  Rng rng;

  bool on_token(Position p) const;
  bool in_zone(Position p) const;
};

DragMatchState drag_new(std::uint64_t seed);

// DOWN on the token picks it up, MOVE carries it, UP drops it: inside the
// target zone scores +1 and re-deals, anywhere else snaps it home.
std::vector<AppEvent> drag_handle(const PointerEvent& event, DragMatchState& state, Micros now);

class DragMatchApp final : public App {
 public:
  std::string_view id() const override { return "drag_match"; }
  void reseed(std::uint64_t seed) override;
  void handle_pointer(const PointerEvent& event) override;
  void update(Micros) override {}
  void render(FrameBuffer& into) const override;
  ExtrasSnapshot extras() const override;

  const DragMatchState& state() const { return state_; }

 private:
  DragMatchState state_;
};

}  // namespace touchboard

#endif  // TOUCHBOARD_APPS_HPP_
