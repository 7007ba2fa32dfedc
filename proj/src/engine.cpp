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

#include "touchboard/engine.hpp"

#include <cmath>

namespace touchboard {

void EngineConfig::validate() const {
  if (max_steps_per_second && !(*max_steps_per_second > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_steps_per_second must be positive");
  }
  if (tick_hz < 30 || tick_hz > 240) {
    throw Error(ErrorCode::kInvalidArgument, "tick_hz must lie in [30, 240]");
  }
  if (action_buffer_limit < 1) {
    throw Error(ErrorCode::kInvalidArgument, "action_buffer_limit must be at least 1");
  }
  if (native_width < 1 || native_height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "screen size must be positive");
  }
}

nlohmann::json engine_config_to_json(const EngineConfig& cfg) {
  nlohmann::json j;
  j["max_steps_per_second"] =
      cfg.max_steps_per_second ? nlohmann::json(*cfg.max_steps_per_second) : nlohmann::json(nullptr);
  j["tick_hz"] = cfg.tick_hz;
  j["action_buffer_limit"] = cfg.action_buffer_limit;
  j["native_width"] = cfg.native_width;
  j["native_height"] = cfg.native_height;
  j["orientation"] = static_cast<int>(cfg.orientation);
  j["clock"] = std::string(clock_mode_name(cfg.clock));
  j["seed"] = cfg.seed;
  return j;
}

EngineConfig engine_config_from_json(const nlohmann::json& j) {
  EngineConfig cfg;
  if (j.contains("max_steps_per_second") && !j["max_steps_per_second"].is_null()) {
    cfg.max_steps_per_second = j["max_steps_per_second"].get<double>();
  }
  cfg.tick_hz = j.value("tick_hz", cfg.tick_hz);
  cfg.action_buffer_limit = j.value("action_buffer_limit", cfg.action_buffer_limit);
  cfg.native_width = j.value("native_width", cfg.native_width);
  cfg.native_height = j.value("native_height", cfg.native_height);
  cfg.orientation = static_cast<Orientation>(j.value("orientation", 0) & 3);
  cfg.clock = parse_clock_mode(j.value("clock", std::string("virtual")));
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.validate();
  return cfg;
}

Micros compute_wait(Micros last_fetch, Micros now, std::optional<double> rate) {
  if (!rate) return 0;
  const auto period = static_cast<Micros>(std::llround(1e6 / *rate));
  return std::max<Micros>(0, period - (now - last_fetch));
}

Engine::Engine(EngineConfig config) : Engine(config, make_clock(config.clock)) {}

Engine::Engine(EngineConfig config, std::unique_ptr<Clock> clock)
    : config_(config), clock_(std::move(clock)) {
  config_.validate();
  config_.clock = clock_->mode();
  frame_ = FrameBuffer(config_.native_width, config_.native_height);
}

Engine::~Engine() { stop_ticker(); }

void Engine::load_task(const TaskSpec& spec) { load_task(spec, make_app(spec.app_id)); }

void Engine::load_task(const TaskSpec& spec, std::unique_ptr<App> app) {
  if (!app) throw Error(ErrorCode::kTaskLoadError, "no app instance");
  stop_ticker();
  std::lock_guard lock(mu_);
  task_ = spec;
  app_ = std::move(app);
  recognizer_ = GestureRecognizer(spec.gestures);
  extras_.clear();
  pending_.clear();
  last_resolved_.reset();
  last_events_.clear();
  started_ = false;
  episode_over_ = false;
  pointer_down_ = false;
  episode_index_ = 0;
  episode_steps_ = 0;
}

bool Engine::has_task() const {
  std::lock_guard lock(mu_);
  return task_.has_value();
}

std::optional<TaskSpec> Engine::task() const {
  std::lock_guard lock(mu_);
  return task_;
}

EngineStatus Engine::status() const {
  std::lock_guard lock(mu_);
  EngineStatus s;
  if (task_) s.task_id = task_->id;
  s.started = started_;
  s.episode_over = episode_over_;
  s.episode_index = episode_index_;
  s.episode_steps = episode_steps_;
  s.sim_time = tick_time(ticks_);
  s.clock = clock_->mode();
  return s;
}

Micros Engine::last_call_time() const {
  std::lock_guard lock(mu_);
  return last_call_;
}

Micros Engine::last_fetch_time() const {
  std::lock_guard lock(mu_);
  return last_fetch_;
}

std::vector<AppEvent> Engine::last_events() const {
  std::lock_guard lock(mu_);
  return last_events_;
}

const App& Engine::app() const {
  if (!app_) throw Error(ErrorCode::kTaskLoadError, "no task loaded");
  return *app_;
}

VirtualClock& Engine::virtual_clock() {
  auto* clock = dynamic_cast<VirtualClock*>(clock_.get());
  if (!clock) throw Error(ErrorCode::kInvalidArgument, "operation needs the VIRTUAL clock");
  return *clock;
}

void Engine::advance(Micros duration) { virtual_clock().advance(duration); }

void Engine::advance_to(Micros t) { virtual_clock().advance_to(t); }

Micros Engine::tick_time(std::uint64_t k) const {
  // Integer tick grid anchored at the episode start; exact for any tick_hz.
  return origin_ + static_cast<Micros>(k * static_cast<std::uint64_t>(kMicrosPerSecond) /
                                       static_cast<std::uint64_t>(config_.tick_hz));
}

void Engine::deliver_locked(const RawAction& action, Micros t) {
  const auto event = to_pointer(action, pointer_down_, t);
  if (!event) return;
  pointer_down_ = event->kind != PointerKind::kUp;
  app_->handle_pointer(*event);
  for (const GestureEvent& g : recognizer_.feed(*event)) app_->handle_gesture(g);
}

void Engine::advance_sim_locked(Micros t) {
  if (!started_) return;
  while (tick_time(ticks_ + 1) <= t) {
    const Micros prev = tick_time(ticks_);
    ++ticks_;
    const Micros now = tick_time(ticks_);
    app_->set_time(now);
    app_->update(now - prev);
    if (!pending_.empty()) {
      const RawAction action = pending_.front();
      pending_.pop_front();
      deliver_locked(action, now);
    }
    for (const GestureEvent& g : recognizer_.advance_to(now)) app_->handle_gesture(g);
  }
}

TimeStep Engine::fetch_locked(StepType default_type) {
  const Micros now = clock_->now();
  advance_sim_locked(now);
  TimeStep ts;
  app_->render(frame_);
  ts.observation.pixels = frame_;
  ts.observation.orientation = config_.orientation;
  ts.observation.timedelta = now - last_fetch_;
  last_fetch_ = now;
  extras_.add(app_->extras());

  last_events_ = app_->drain_events();
  if (default_type == StepType::kFirst) {
    ts.step_type = StepType::kFirst;
    ts.observation.timedelta = 0;
    return ts;
  }
  const double elapsed = static_cast<double>(now - origin_) / static_cast<double>(kMicrosPerSecond);
  const FoldResult folded = fold_events(last_events_, *task_, elapsed);
  ts.reward = folded.reward;
  ++episode_steps_;
  if (folded.ended) {
    ts.step_type = StepType::kLast;
    ts.discount = 0.0;
    episode_over_ = true;
  } else {
    ts.step_type = StepType::kMid;
  }
  return ts;
}

TimeStep Engine::reset() {
  TimeStep ts;
  {
    std::lock_guard lock(mu_);
    ts = reset_locked();
  }
  if (clock_->mode() == ClockMode::kRealtime) start_ticker();
  return ts;
}

TimeStep Engine::reset_locked() {
  if (!task_ || !app_) throw Error(ErrorCode::kTaskLoadError, "reset() needs a loaded task");
  const Micros now = clock_->now();
  const std::uint64_t episode_seed = config_.seed + episode_index_;
  ++episode_index_;
  if (task_->resets_with("relaunch_app")) app_->reseed(episode_seed);
  if (task_->resets_with("clear_logs")) app_->clear_events();
  recognizer_.reset();
  extras_.clear();
  pending_.clear();
  last_resolved_.reset();
  pointer_down_ = false;
  origin_ = now;
  ticks_ = 0;
  app_->set_time(now);
  last_fetch_ = now;
  last_call_ = now;
  episode_steps_ = 0;
  started_ = true;
  episode_over_ = false;
  return fetch_locked(StepType::kFirst);
}

TimeStep Engine::step(std::span<const RawAction> actions) { return step_impl(actions, std::nullopt); }

TimeStep Engine::step_until(std::span<const RawAction> actions, Micros fetch_at) {
  if (fetch_at < virtual_clock().now()) {
    throw Error(ErrorCode::kInvalidArgument, "fetch time lies in the past");
  }
  return step_impl(actions, fetch_at);
}

TimeStep Engine::step_impl(std::span<const RawAction> actions, std::optional<Micros> fetch_at) {
  Micros wait = 0;
  {
    std::lock_guard lock(mu_);
    if (!started_) throw Error(ErrorCode::kNotStarted, "step() called before reset()");
    for (const RawAction& a : actions) {
      try {
        validate_action(a);
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidAction, e.detail());
      }
    }
    if (episode_over_) {
      // Stepping past LAST starts a new episode, as in dm_env.
      return reset_locked();
    }
    const Micros now = clock_->now();
    advance_sim_locked(now);
    last_call_ = now;
    for (const RawAction& a : actions) {
      RawAction resolved = resolve_repeat(a, last_resolved_);
      last_resolved_ = resolved;
      // A lift has no location; dropping it here makes every LIFT identical.
      if (resolved.type == ActionType::kLift) resolved.position = {};
      pending_.push_back(resolved);
      while (pending_.size() > static_cast<std::size_t>(config_.action_buffer_limit)) {
        pending_.pop_front();
      }
    }
    if (!fetch_at) wait = compute_wait(last_fetch_, now, config_.max_steps_per_second);
  }

  if (fetch_at) {
    virtual_clock().advance_to(*fetch_at);
  } else {
    clock_->wait(wait);
  }

  std::lock_guard lock(mu_);
  return fetch_locked(StepType::kMid);
}

ExtrasMap Engine::request_extras() {
  std::lock_guard lock(mu_);
  if (!task_) throw Error(ErrorCode::kTaskLoadError, "no task loaded");
  return extras_.take(*task_);
}

void Engine::start_ticker() {
  std::lock_guard lock(mu_);
  if (ticker_.joinable()) return;
  stop_ticker_ = false;
  ticker_ = std::thread([this] { ticker_loop(); });
}

void Engine::stop_ticker() {
  {
    std::lock_guard lock(mu_);
    if (!ticker_.joinable()) return;
    stop_ticker_ = true;
  }
  ticker_cv_.notify_all();
  ticker_.join();
  ticker_ = std::thread();
}

void Engine::ticker_loop() {
  std::unique_lock lock(mu_);
  while (!stop_ticker_) {
    const Micros now = clock_->now();
    advance_sim_locked(now);
    const Micros next = started_ ? tick_time(ticks_ + 1) : now + kMicrosPerSecond / config_.tick_hz;
    ticker_cv_.wait_for(lock, std::chrono::microseconds(std::max<Micros>(next - now, 100)),
                        [this] { return stop_ticker_; });
  }
}

}  // namespace touchboard
