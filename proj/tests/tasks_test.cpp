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

#include <cmath>
#include <functional>

#include "touchboard/tasks.hpp"

namespace touchboard {
namespace {

constexpr const char* kMinimalCatch = R"({
  "id": "catch_min",
  "app_id": "catch",
  "max_episode_seconds": 60,
  "reward_rules": [{"event": "score", "scale": 1}],
  "extras": {"ball_pos": [2]}
})";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

AppEvent ev(std::string name, double v) { return {0, std::move(name), v}; }

TEST(LoadTask, MinimalCatch) {
  const TaskSpec spec = load_task(kMinimalCatch);
  EXPECT_EQ(spec.id, "catch_min");
  EXPECT_EQ(spec.app_id, "catch");
  ASSERT_EQ(spec.reward_rules.size(), 1u);
  EXPECT_EQ(spec.reward_rules[0].event, "score");
  ASSERT_EQ(spec.episode_end.size(), 1u);
  EXPECT_EQ(spec.time_limit_seconds(), 60.0);
  EXPECT_TRUE(spec.resets_with("relaunch_app"));
}

TEST(LoadTask, Errors) {
  std::string chess = kMinimalCatch;
  chess.replace(chess.find("\"catch\""), 7, "\"chess\"");
  EXPECT_EQ(code_of([&] { load_task(chess); }), ErrorCode::kUnknownApp);

  std::string negative = kMinimalCatch;
  negative.replace(negative.find("60"), 2, "-5");
  EXPECT_EQ(code_of([&] { load_task(negative); }), ErrorCode::kSchemaError);

  std::string extra = kMinimalCatch;
  extra.insert(1, R"("colour": "red",)");
  EXPECT_EQ(code_of([&] { load_task(extra); }), ErrorCode::kSchemaError);

  EXPECT_EQ(code_of([] { load_task("{\"id\": "); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { load_task(R"({"id": "x", "app_id": "catch"})"); }), ErrorCode::kSchemaError);
  EXPECT_EQ(code_of([] {
              load_task(R"({"id": "x", "app_id": "catch", "reward_rules": [], "extras": {"a": [0]}})");
            }),
            ErrorCode::kSchemaError);
}

TEST(LoadTask, JsonRoundTrip) {
  const TaskSpec spec = load_task(kMinimalCatch);
  const TaskSpec again = load_task(task_to_json(spec).dump());
  EXPECT_EQ(task_to_json(again), task_to_json(spec));
}

TEST(FoldEvents, Examples) {
  TaskSpec spec = load_task(kMinimalCatch);
  FoldResult r = fold_events({ev("score", 1), ev("score", 1)}, spec, 1.0);
  EXPECT_EQ(r.reward, 2.0);
  EXPECT_FALSE(r.ended);

  spec.episode_end.push_back(ResetTrigger::on_event("episode_end"));
  r = fold_events({ev("episode_end", 1)}, spec, 1.0);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_TRUE(r.ended);

  r = fold_events({}, spec, 61.0);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_TRUE(r.ended);
}

TEST(FoldEvents, RewardIsLinearInEvents) {
  // fold(a ++ b) == fold(a) + fold(b) for any split, with several rules.
  TaskSpec spec = load_task(kMinimalCatch);
  spec.reward_rules.push_back({"bonus", -2.5});
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<AppEvent> a, b;
    for (int i = 0; i < 20; ++i) {
      const char* names[] = {"score", "bonus", "noise"};
      AppEvent e = ev(names[rng.below(3)], std::floor(rng.uniform01() * 9.0) - 4.0);
      (rng.uniform01() < 0.5 ? a : b).push_back(e);
    }
    std::vector<AppEvent> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    EXPECT_DOUBLE_EQ(fold_events(ab, spec, 0).reward,
                     fold_events(a, spec, 0).reward + fold_events(b, spec, 0).reward);
  }
}

TEST(Extras, AccumulateAndClearOnRead) {
  const TaskSpec spec = load_task(kMinimalCatch);
  ExtrasAccumulator acc;
  acc.add({{"ball_pos", {{2}, {0.1, 0.2}}}, {"undeclared", {{1}, {7}}}});
  acc.add({{"ball_pos", {{2}, {0.1, 0.3}}}});
  const ExtrasMap got = request_extras(spec, acc);
  ASSERT_EQ(got.size(), 1u);
  ASSERT_EQ(got.at("ball_pos").size(), 2u);
  EXPECT_EQ(got.at("ball_pos")[1].values, (std::vector<double>{0.1, 0.3}));
  EXPECT_TRUE(request_extras(spec, acc).empty());
}

TEST(Extras, ShapeMismatch) {
  const TaskSpec spec = load_task(kMinimalCatch);
  ExtrasAccumulator acc;
  acc.add({{"ball_pos", {{3}, {0.1, 0.2, 0.3}}}});
  EXPECT_EQ(code_of([&] { request_extras(spec, acc); }), ErrorCode::kShapeMismatch);
}

TEST(TaskRegistry, ShipsFourTasks) {
  const TaskRegistry reg(default_task_dir());
  EXPECT_EQ(reg.ids(), (std::vector<std::string>{"catch_default", "drag_match_default",
                                                  "press_button_default", "slide_2048_default"}));
  EXPECT_EQ(reg.get("slide_2048_default").app_id, "slide_2048");
  EXPECT_EQ(code_of([&] { reg.get("nope"); }), ErrorCode::kUnknownTask);
}

}  // namespace
}  // namespace touchboard
