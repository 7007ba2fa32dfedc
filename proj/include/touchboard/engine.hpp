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

#ifndef TOUCHBOARD_ENGINE_HPP_
#define TOUCHBOARD_ENGINE_HPP_

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "touchboard/apps.hpp"
#include "touchboard/clock.hpp"
#include "touchboard/environment.hpp"
#include "touchboard/tasks.hpp"
#include "touchboard/touch.hpp"

namespace touchboard {

struct EngineConfig {
  // Pacing target; nullopt disables the wait before each fetch.
  std::optional<double> max_steps_per_second;
  int tick_hz = 60;
  int action_buffer_limit = 32;
  int native_width = 240;
  int native_height = 360;
  Orientation orientation = Orientation::kPortrait0;
  ClockMode clock = ClockMode::kVirtual;
  // Episode n is seeded with seed + n.
  std::uint64_t seed = 0;

  // tick_hz in [30, 240], action_buffer_limit >= 1, positive sizes and rate.
  void validate() const;
};

nlohmann::json engine_config_to_json(const EngineConfig& cfg);
EngineConfig engine_config_from_json(const nlohmann::json& j);

// Pacing wait before an observation fetch:
// max(0, round(1e6 / rate) - (now - last_fetch)), or 0 without a rate.
Micros compute_wait(Micros last_fetch, Micros now, std::optional<double> rate);

struct EngineStatus {
  std::string task_id;
  bool started = false;
  bool episode_over = false;
  std::uint64_t episode_index = 0;  // episodes started so far
  std::uint64_t episode_steps = 0;
  Micros sim_time = 0;
  ClockMode clock = ClockMode::kVirtual;
};

// Runs one app under one task. The app keeps simulating in fixed ticks of
// 1/tick_hz whether or not the agent acts; actions queue up and are delivered
// one per tick. In REALTIME mode a background ticker drives the simulation;
// in VIRTUAL mode the simulation catches up whenever the clock is read.
class Engine final : public Environment {
 public:
  explicit Engine(EngineConfig config = {});
  Engine(EngineConfig config, std::unique_ptr<Clock> clock);
  ~Engine() override;

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  // Instantiates the task's app from the registry.
  void load_task(const TaskSpec& spec);
  // Uses a caller-supplied app instance instead of the registry.
  void load_task(const TaskSpec& spec, std::unique_ptr<App> app);
  bool has_task() const;

  TimeStep reset() override;
  using Environment::step;
  TimeStep step(std::span<const RawAction> actions) override;
  ExtrasMap request_extras() override;

  // VIRTUAL only: delivers `actions` now and fetches exactly at `fetch_at`
  // instead of waiting for the pacing period. Used to re-drive recordings.
  TimeStep step_until(std::span<const RawAction> actions, Micros fetch_at);
  // VIRTUAL only: stands in for agent deliberation time.
  void advance(Micros duration);
  void advance_to(Micros t);

  const EngineConfig& config() const { return config_; }
  const Clock& clock() const { return *clock_; }
  EngineStatus status() const;
  std::optional<TaskSpec> task() const;

  // Details of the most recent reset/step.
  Micros last_call_time() const;
  Micros last_fetch_time() const;
  std::vector<AppEvent> last_events() const;

  // Read access for tests; VIRTUAL mode only, where nothing runs concurrently.
  const App& app() const;

 private:
  TimeStep step_impl(std::span<const RawAction> actions, std::optional<Micros> fetch_at);
  TimeStep reset_locked();
  TimeStep fetch_locked(StepType default_type);
  Micros tick_time(std::uint64_t k) const;
  void advance_sim_locked(Micros t);
  void deliver_locked(const RawAction& action, Micros t);
  void start_ticker();
  void stop_ticker();
  void ticker_loop();
  VirtualClock& virtual_clock();

  EngineConfig config_;
  std::unique_ptr<Clock> clock_;

  mutable std::mutex mu_;
  std::optional<TaskSpec> task_;
  std::unique_ptr<App> app_;
  GestureRecognizer recognizer_;
  ExtrasAccumulator extras_;
  FrameBuffer frame_;

  bool started_ = false;
  bool episode_over_ = false;
  bool pointer_down_ = false;
  std::uint64_t episode_index_ = 0;
  std::uint64_t episode_steps_ = 0;
  Micros origin_ = 0;  // time of tick 0, set at reset
  std::uint64_t ticks_ = 0;
  Micros last_fetch_ = 0;
  Micros last_call_ = 0;
  std::optional<RawAction> last_resolved_;
  std::deque<RawAction> pending_;
  std::vector<AppEvent> last_events_;

  std::thread ticker_;
  std::condition_variable ticker_cv_;
  bool stop_ticker_ = false;
};

}  // namespace touchboard

#endif  // TOUCHBOARD_ENGINE_HPP_
