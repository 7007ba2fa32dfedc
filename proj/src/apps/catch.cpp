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

#include <cmath>

#include "touchboard/apps.hpp"

namespace touchboard {
namespace {

constexpr Rgb kBackground{24, 26, 38};
constexpr Rgb kBall{240, 200, 60};
constexpr Rgb kPaddle{80, 200, 255};
constexpr double kPaddleThickness = 0.025;

double spawn_x(Rng& rng) { return rng.uniform(0.05, 0.95); }

}  // namespace

CatchState catch_new(std::uint64_t seed, CatchParams params) {
  CatchState s;
  s.params = params;
  s.rng = Rng(seed);
  s.ball = {spawn_x(s.rng), 0.0};
  s.paddle_x = 0.5;
  return s;
}

std::vector<AppEvent> catch_update(CatchState& s, Micros dt, Micros now) {
  std::vector<AppEvent> events;
  if (dt <= 0) return events;
  s.ball.y += s.params.ball_speed * static_cast<double>(dt) / static_cast<double>(kMicrosPerSecond);
  if (s.ball.y >= s.params.paddle_row) {
    const bool caught = std::abs(s.ball.x - s.paddle_x) <= s.params.paddle_half_width;
    events.push_back({now, "score", caught ? 1.0 : -1.0});
    s.ball = {spawn_x(s.rng), 0.0};
  }
  return events;
}

CatchApp::CatchApp(CatchParams params) : params_(params), state_(catch_new(0, params)) {}

void CatchApp::reseed(std::uint64_t seed) {
  state_ = catch_new(seed, params_);
  clear_events();
}

void CatchApp::handle_pointer(const PointerEvent& event) {
  // The paddle teleports to wherever the finger is.
  if (event.position) state_.paddle_x = event.position->x;
}

void CatchApp::update(Micros dt) { emit_all(catch_update(state_, dt, time())); }

void CatchApp::render(FrameBuffer& into) const {
  into.fill(kBackground);
  const double row = state_.params.paddle_row;
  const double hw = state_.params.paddle_half_width;
  into.fill_rect(state_.paddle_x - hw, row, state_.paddle_x + hw, row + kPaddleThickness, kPaddle);
  into.fill_circle(state_.ball.x, state_.ball.y, state_.params.ball_radius, kBall);
}

ExtrasSnapshot CatchApp::extras() const {
  return {{"ball_pos", {{2}, {state_.ball.x, state_.ball.y}}},
          {"paddle_pos", {{1}, {state_.paddle_x}}}};
}

}  // namespace touchboard
