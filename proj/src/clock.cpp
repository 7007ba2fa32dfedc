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

#include "touchboard/clock.hpp"

#include <thread>

namespace touchboard {

std::string_view clock_mode_name(ClockMode mode) {
  return mode == ClockMode::kRealtime ? "real" : "virtual";
}

ClockMode parse_clock_mode(std::string_view text) {
  if (text == "real" || text == "realtime") return ClockMode::kRealtime;
  if (text == "virtual") return ClockMode::kVirtual;
  throw Error(ErrorCode::kInvalidArgument, "unknown clock mode '" + std::string(text) + "'");
}

Micros RealtimeClock::now() const {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now() - origin_)
      .count();
}

void RealtimeClock::wait(Micros duration) {
  if (duration <= 0) return;
  const Micros deadline = now() + duration;
  constexpr Micros kSpinWindow = 1000;
  if (duration > kSpinWindow) {
    std::this_thread::sleep_for(std::chrono::microseconds(duration - kSpinWindow));
  }
  while (now() < deadline) {
    std::this_thread::yield();
  }
}

void VirtualClock::advance(Micros duration) {
  if (duration < 0) {
    throw Error(ErrorCode::kInvalidArgument, "virtual clock cannot move backwards");
  }
  now_.fetch_add(duration);
}

void VirtualClock::advance_to(Micros t) {
  const Micros current = now_.load();
  if (t < current) {
    throw Error(ErrorCode::kInvalidArgument, "virtual clock cannot move backwards");
  }
  now_.store(t);
}

std::unique_ptr<Clock> make_clock(ClockMode mode) {
  if (mode == ClockMode::kRealtime) return std::make_unique<RealtimeClock>();
  return std::make_unique<VirtualClock>();
}

}  // namespace touchboard
