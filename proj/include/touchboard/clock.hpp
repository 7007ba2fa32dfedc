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

#ifndef TOUCHBOARD_CLOCK_HPP_
#define TOUCHBOARD_CLOCK_HPP_

#include <atomic>
#include <chrono>
#include <memory>
#include <string_view>

#include "touchboard/core.hpp"

namespace touchboard {

enum class ClockMode { kRealtime, kVirtual };

std::string_view clock_mode_name(ClockMode mode);
ClockMode parse_clock_mode(std::string_view text);

// Monotonic time source. now() never decreases.
class Clock {
 public:
  virtual ~Clock() = default;

  virtual ClockMode mode() const = 0;
  virtual Micros now() const = 0;
  // Blocks (REALTIME) or advances time (VIRTUAL) by `duration`.
  virtual void wait(Micros duration) = 0;
};

// Wall clock measured from construction.
class RealtimeClock final : public Clock {
 public:
  RealtimeClock() : origin_(std::chrono::steady_clock::now()) {}

  ClockMode mode() const override { return ClockMode::kRealtime; }
  Micros now() const override;
  // Sleeps until 1 ms before the deadline, then spins.
  void wait(Micros duration) override;

 private:
  std::chrono::steady_clock::time_point origin_;
};

// Deterministic clock; time moves only through advance() or wait().
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Micros start = 0) : now_(start) {}

  ClockMode mode() const override { return ClockMode::kVirtual; }
  Micros now() const override { return now_.load(); }
  void wait(Micros duration) override { advance(duration); }

  void advance(Micros duration);
  void advance_to(Micros t);

 private:
  std::atomic<Micros> now_;
};

std::unique_ptr<Clock> make_clock(ClockMode mode);

}  // namespace touchboard

#endif  // TOUCHBOARD_CLOCK_HPP_
