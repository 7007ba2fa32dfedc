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

constexpr Rgb kBackground{236, 236, 240};
constexpr Rgb kButton{214, 58, 64};

void relocate(ButtonState& s) {
  s.center = {s.rng.uniform(ButtonState::kWidth / 2, 1.0 - ButtonState::kWidth / 2),
              s.rng.uniform(ButtonState::kHeight / 2, 1.0 - ButtonState::kHeight / 2)};
}

}  // namespace

bool ButtonState::contains(Position p) const {
  return std::abs(p.x - center.x) <= kWidth / 2 && std::abs(p.y - center.y) <= kHeight / 2;
}

ButtonState button_new(std::uint64_t seed) {
  ButtonState s;
  s.rng = Rng(seed);
  relocate(s);
  return s;
}

std::vector<AppEvent> button_handle(const GestureEvent& gesture, ButtonState& s, Micros now) {
  if (gesture.kind != GestureKind::kTap || !s.contains(gesture.position)) return {};
  relocate(s);
  return {{now, "score", 1.0}};
}

void ButtonApp::reseed(std::uint64_t seed) {
  state_ = button_new(seed);
  clear_events();
}

void ButtonApp::handle_gesture(const GestureEvent& gesture) {
  emit_all(button_handle(gesture, state_, time()));
}

void ButtonApp::render(FrameBuffer& into) const {
  into.fill(kBackground);
  const Position c = state_.center;
  into.fill_rect(c.x - ButtonState::kWidth / 2, c.y - ButtonState::kHeight / 2,
                 c.x + ButtonState::kWidth / 2, c.y + ButtonState::kHeight / 2, kButton);
}

ExtrasSnapshot ButtonApp::extras() const {
  return {{"button_pos", {{2}, {state_.center.x, state_.center.y}}}};
}

}  // namespace touchboard
