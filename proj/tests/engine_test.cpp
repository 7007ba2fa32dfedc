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

#include <gtest/gtest.h>

#include <chrono>
#include <functional>
#include <thread>

#include "touchboard/engine.hpp"

namespace touchboard {
namespace {

const std::vector<RawAction> kNoActions;

TaskSpec catch_task(double limit = 60.0) {
  TaskSpec spec;
  spec.id = "catch_test";
  spec.app_id = "catch";
  spec.reward_rules = {{"score", 1.0}};
  spec.episode_end = {ResetTrigger::time_limit(limit)};
  spec.extras = {{"ball_pos", {2}}, {"paddle_pos", {1}}};
  return spec;
}

// Records every pointer event it receives.
class ProbeApp final : public App {
 public:
  explicit ProbeApp(std::vector<PointerEvent>* sink) : sink_(sink) {}

  std::string_view id() const override { return "probe"; }
  void reseed(std::uint64_t) override {}
  void handle_pointer(const PointerEvent& e) override { sink_->push_back(e); }
  void update(Micros) override {}
  void render(FrameBuffer& into) const override { into.fill({0, 0, 0}); }
  ExtrasSnapshot extras() const override { return {}; }

 private:
  std::vector<PointerEvent>* sink_;
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(ComputeWait, Examples) {
  EXPECT_EQ(compute_wait(0, 30'000, 10.0), 70'000);
  EXPECT_EQ(compute_wait(0, 150'000, 10.0), 0);
  EXPECT_EQ(compute_wait(0, 0, 60.0), 16'667);
  EXPECT_EQ(compute_wait(0, 0, std::nullopt), 0);
}

TEST(Engine, Preconditions) {
  Engine engine;
  EXPECT_EQ(code_of([&] { engine.reset(); }), ErrorCode::kTaskLoadError);
  engine.load_task(catch_task());
  EXPECT_EQ(code_of([&] { engine.step(RawAction{}); }), ErrorCode::kNotStarted);
  engine.reset();
  EXPECT_EQ(code_of([&] { engine.step(RawAction{ActionType::kTouch, {1.2, 0.5}}); }),
            ErrorCode::kInvalidAction);
  EXPECT_THROW(Engine(EngineConfig{.tick_hz = 10}), Error);
}

TEST(Engine, ResetContract) {
  Engine engine;
  engine.load_task(catch_task());
  const TimeStep ts = engine.reset();
  EXPECT_TRUE(ts.first());
  EXPECT_EQ(ts.reward, 0.0);
  EXPECT_EQ(ts.observation.timedelta, 0);
  EXPECT_EQ(ts.observation.pixels.width(), 240);
  EXPECT_EQ(ts.observation.pixels.height(), 360);
}

TEST(Engine, ResetTwiceReseedsFromEpisodeSequence) {
  Engine engine(EngineConfig{.seed = 10});
  engine.load_task(catch_task());
  const TimeStep a = engine.reset();
  const TimeStep b = engine.reset();
  EXPECT_TRUE(a.first());
  EXPECT_TRUE(b.first());
  EXPECT_EQ(engine.status().episode_index, 2u);
  // Episode 1 of seed 10 starts like episode 0 of seed 11.
  Engine other(EngineConfig{.seed = 11});
  other.load_task(catch_task());
  EXPECT_EQ(other.reset().observation.pixels, b.observation.pixels);
  EXPECT_NE(a.observation.pixels, b.observation.pixels);
}

TEST(Engine, BufferKeepsNewestActionsInOrder) {
  std::vector<PointerEvent> seen;
  Engine engine;
  engine.load_task(catch_task(), std::make_unique<ProbeApp>(&seen));
  engine.reset();
  std::vector<RawAction> actions;
  for (int i = 0; i < 100; ++i) actions.push_back({ActionType::kTouch, {i / 100.0, 0.5}});
  engine.step_until(actions, 2 * kMicrosPerSecond);
  ASSERT_EQ(seen.size(), 32u);
  for (int i = 0; i < 32; ++i) {
    ASSERT_TRUE(seen[i].position.has_value());
    EXPECT_DOUBLE_EQ(seen[i].position->x, (68 + i) / 100.0);
    EXPECT_EQ(seen[i].kind, i == 0 ? PointerKind::kDown : PointerKind::kMove);
    if (i > 0) EXPECT_GT(seen[i].t, seen[i - 1].t);  // one per tick
  }
}

TEST(Engine, AppAdvancesWithoutActions) {
  Engine engine(EngineConfig{.seed = 3});
  engine.load_task(catch_task());
  engine.reset();
  engine.request_extras();
  const auto& app = dynamic_cast<const CatchApp&>(engine.app());
  const double y0 = app.state().ball.y;
  engine.advance(100'000);
  const TimeStep ts = engine.step(kNoActions);
  EXPECT_EQ(ts.observation.timedelta, 100'000);
  EXPECT_NEAR(app.state().ball.y - y0, 0.35 * 0.1, 1e-9);
}

TEST(Engine, SimulationIndependentOfStepSchedule) {
  // The app state at a fixed time is the same however the idle agent slices
  // that time into steps.
  auto frame_at = [](const std::vector<Micros>& schedule) {
    Engine engine(EngineConfig{.seed = 8});
    engine.load_task(catch_task());
    engine.reset();
    for (Micros t : schedule) engine.step_until({}, t);
    engine.step_until({}, 3 * kMicrosPerSecond);
    return engine.step_until({}, 3 * kMicrosPerSecond).observation.pixels;
  };
  const FrameBuffer reference = frame_at({});
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Micros> schedule;
    Micros t = 0;
    while (true) {
      t += 1 + static_cast<Micros>(rng.below(400'000));
      if (t >= 3 * kMicrosPerSecond) break;
      schedule.push_back(t);
    }
    EXPECT_EQ(frame_at(schedule), reference) << trial;
  }
}

TEST(Engine, EpisodeShapeAndAutoReset) {
  Engine engine(EngineConfig{.max_steps_per_second = 10.0});
  engine.load_task(catch_task(1.0));
  TimeStep ts = engine.reset();
  ASSERT_TRUE(ts.first());
  int mids = 0;
  while (!(ts = engine.step(kNoActions)).last()) {
    ASSERT_TRUE(ts.mid());
    ASSERT_EQ(ts.discount, 1.0);
    ++mids;
  }
  EXPECT_EQ(mids, 9);  // 10 paced steps reach the 1 s limit
  EXPECT_EQ(ts.discount, 0.0);
  EXPECT_TRUE(engine.step(kNoActions).first());
}

TEST(Engine, PacedTimedeltaIsThePeriod) {
  Engine engine(EngineConfig{.max_steps_per_second = 20.0});
  engine.load_task(catch_task());
  engine.reset();
  engine.advance(20'000);  // deliberation shorter than the period
  EXPECT_EQ(engine.step(kNoActions).observation.timedelta, 50'000);
  engine.advance(80'000);  // longer than the period: no wait
  EXPECT_EQ(engine.step(kNoActions).observation.timedelta, 80'000);
}

struct Trace {
  std::vector<double> rewards;
  std::vector<StepType> types;
  std::vector<FrameBuffer> frames;

  bool operator==(const Trace&) const = default;
};

Trace run(const std::string& app, const std::vector<RawAction>& actions, std::uint64_t seed) {
  TaskSpec spec = catch_task(5.0);
  spec.app_id = app;
  Engine engine(EngineConfig{.max_steps_per_second = 15.0, .seed = seed});
  engine.load_task(spec);
  Trace t;
  TimeStep ts = engine.reset();
  for (const RawAction& a : actions) {
    t.rewards.push_back(ts.reward);
    t.types.push_back(ts.step_type);
    t.frames.push_back(ts.observation.pixels);
    ts = engine.step(a);
  }
  return t;
}

TEST(Engine, DeterministicGivenSeedAndActions) {
  Rng rng(1);
  std::vector<RawAction> actions;
  for (int i = 0; i < 120; ++i) {
    actions.push_back({static_cast<ActionType>(rng.below(3)), {rng.uniform01(), rng.uniform01()}});
  }
  for (const std::string& app : registered_apps()) {
    EXPECT_EQ(run(app, actions, 4), run(app, actions, 4)) << app;
  }
}

TEST(Engine, LiftPositionHasNoEffect) {
  Rng rng(2);
  for (const std::string& app : registered_apps()) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<RawAction> a, b;
      for (int i = 0; i < 60; ++i) {
        RawAction x{static_cast<ActionType>(rng.below(3)), {rng.uniform01(), rng.uniform01()}};
        RawAction y = x;
        if (x.type == ActionType::kLift) y.position = {rng.uniform01(), rng.uniform01()};
        a.push_back(x);
        b.push_back(y);
      }
      ASSERT_EQ(run(app, a, 9), run(app, b, 9)) << app;
    }
  }
}

TEST(Engine, ExtrasOnlyOnRequest) {
  Engine engine;
  engine.load_task(catch_task());
  engine.reset();
  engine.step(kNoActions);
  engine.step(kNoActions);
  const ExtrasMap extras = engine.request_extras();
  EXPECT_EQ(extras.at("ball_pos").size(), 3u);  // reset plus two steps
  EXPECT_EQ(extras.at("paddle_pos").size(), 3u);
  EXPECT_TRUE(engine.request_extras().empty());
}

TEST(Engine, RealtimeTickerAdvancesTheApp) {
  Engine engine(EngineConfig{.clock = ClockMode::kRealtime});
  engine.load_task(catch_task());
  engine.reset();
  std::this_thread::sleep_for(std::chrono::milliseconds(120));
  EXPECT_GE(engine.status().sim_time - engine.last_fetch_time(), 80'000);
  const TimeStep ts = engine.step(kNoActions);
  EXPECT_GE(ts.observation.timedelta, 100'000);
}

TEST(EngineConfig, JsonRoundTrip) {
  EngineConfig cfg{.max_steps_per_second = 12.5, .tick_hz = 120, .seed = 77};
  const EngineConfig back = engine_config_from_json(engine_config_to_json(cfg));
  EXPECT_EQ(engine_config_to_json(back), engine_config_to_json(cfg));
}

}  // namespace
}  // namespace touchboard
