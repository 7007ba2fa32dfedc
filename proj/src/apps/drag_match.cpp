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

constexpr Rgb kBackground{34, 52, 40};
constexpr Rgb kZone{70, 150, 80};
constexpr Rgb kToken{250, 250, 250};

void deal(DragMatchState& s) {
  s.home = {s.rng.uniform(0.1, 0.9), s.rng.uniform(0.1, 0.9)};
  do {
    s.target = {s.rng.uniform(0.15, 0.85), s.rng.uniform(0.15, 0.85)};
  } while (std::hypot(s.target.x - s.home.x, s.target.y - s.home.y) < 0.35);
  s.token = s.home;
  s.attached = false;
}

}  // namespace

bool DragMatchState::on_token(Position p) const {
  return std::hypot(p.x - token.x, p.y - token.y) <= kTokenRadius;
}

bool DragMatchState::in_zone(Position p) const {
  return std::abs(p.x - target.x) <= kZoneHalf && std::abs(p.y - target.y) <= kZoneHalf;
}

DragMatchState drag_new(std::uint64_t seed) {
  DragMatchState s;
  s.rng = Rng(seed);
  deal(s);
  return s;
}

std::vector<AppEvent> drag_handle(const PointerEvent& event, DragMatchState& s, Micros now) {
  switch (event.kind) {
    case PointerKind::kDown:
      if (event.position && s.on_token(*event.position)) {
        s.attached = true;
        s.grab_offset = {s.token.x - event.position->x, s.token.y - event.position->y};
      }
      break;
    case PointerKind::kMove:
      if (s.attached && event.position) {
        s.token = {event.position->x + s.grab_offset.x, event.position->y + s.grab_offset.y};
      }
      break;
    case PointerKind::kUp:
      if (!s.attached) break;
      if (s.in_zone(s.token)) {
        ++s.successes;
        deal(s);
        return {{now, "score", 1.0}};
      }
      s.token = s.home;
      s.attached = false;
      break;
  }
  return {};
}

void DragMatchApp::reseed(std::uint64_t seed) {
  state_ = drag_new(seed);
  clear_events();
}

void DragMatchApp::handle_pointer(const PointerEvent& event) {
  emit_all(drag_handle(event, state_, time()));
}

void DragMatchApp::render(FrameBuffer& into) const {
  into.fill(kBackground);
  const Position z = state_.target;
  const double half = DragMatchState::kZoneHalf;
  into.fill_rect(z.x - half, z.y - half, z.x + half, z.y + half, kZone);
  into.fill_circle(state_.token.x, state_.token.y, DragMatchState::kTokenRadius, kToken);
}

ExtrasSnapshot DragMatchApp::extras() const {
  return {{"token_pos", {{2}, {state_.token.x, state_.token.y}}},
          {"target_pos", {{2}, {state_.target.x, state_.target.y}}}};
}

}  // namespace touchboard
