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

#include "touchboard/core.hpp"

namespace touchboard {
namespace {

TEST(ValidateAction, AcceptsInteriorAndBoundary) {
  EXPECT_NO_THROW(validate_action({ActionType::kTouch, {0.5, 0.5}}));
  EXPECT_NO_THROW(validate_action({ActionType::kLift, {0.0, 1.0}}));
}

TEST(ValidateAction, RejectsOutsideUnitSquare) {
  try {
    validate_action({ActionType::kTouch, {1.2, 0.5}});
    FAIL() << "expected OutOfBounds";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfBounds);
  }
  EXPECT_THROW(validate_action({ActionType::kTouch, {0.5, -0.01}}), Error);
}

TEST(ResolveRepeat, NonRepeatPassesThrough) {
  const RawAction touch{ActionType::kTouch, {0.2, 0.3}};
  EXPECT_EQ(resolve_repeat(touch, std::nullopt), touch);
  EXPECT_EQ(resolve_repeat(touch, RawAction{ActionType::kLift, {0.9, 0.1}}), touch);
}

TEST(ResolveRepeat, RepeatTakesLastResolved) {
  const RawAction last{ActionType::kTouch, {0.2, 0.3}};
  EXPECT_EQ(resolve_repeat({ActionType::kRepeat, {0.9, 0.9}}, last), last);
}

TEST(ResolveRepeat, RepeatWithoutHistoryIsLift) {
  const RawAction r = resolve_repeat({ActionType::kRepeat, {0.9, 0.9}}, std::nullopt);
  EXPECT_EQ(r, (RawAction{ActionType::kLift, {0.9, 0.9}}));
}

TEST(ResolveRepeat, NeverYieldsRepeat) {
  Rng rng(11);
  std::optional<RawAction> last;
  for (int i = 0; i < 5000; ++i) {
    const RawAction a{static_cast<ActionType>(rng.below(3)), {rng.uniform01(), rng.uniform01()}};
    const RawAction r = resolve_repeat(a, last);
    ASSERT_NE(r.type, ActionType::kRepeat);
    if (a.type != ActionType::kRepeat) ASSERT_EQ(r, a);
    last = r;
  }
}

TEST(Orientation, OneHotHasSingleOne) {
  for (int o = 0; o < 4; ++o) {
    const auto v = one_hot(static_cast<Orientation>(o));
    float sum = 0;
    for (float f : v) sum += f;
    EXPECT_EQ(sum, 1.0f);
    EXPECT_EQ(v[o], 1.0f);
  }
}

TEST(FrameBuffer, SizeInvariant) {
  FrameBuffer f(240, 360, Rgb{1, 2, 3});
  EXPECT_TRUE(f.valid());
  EXPECT_EQ(f.data().size(), 240u * 360u * 3u);
  EXPECT_EQ(f.at(239, 359), (Rgb{1, 2, 3}));
  EXPECT_THROW(FrameBuffer(2, 2, std::vector<std::uint8_t>(11)), Error);
}

TEST(FrameBuffer, ShapesAreClipped) {
  FrameBuffer f(10, 10);
  f.fill_rect(-1.0, -1.0, 0.5, 0.5, {255, 0, 0});
  f.fill_circle(1.0, 1.0, 0.3, {0, 255, 0});
  EXPECT_EQ(f.at(0, 0), (Rgb{255, 0, 0}));
  EXPECT_EQ(f.at(4, 4), (Rgb{255, 0, 0}));
  EXPECT_EQ(f.at(5, 5), (Rgb{0, 0, 0}));
  EXPECT_EQ(f.at(9, 9), (Rgb{0, 255, 0}));
}

TEST(Json, RawActionCanonicalForm) {
  const RawAction a{ActionType::kRepeat, {0.25, 0.75}};
  const nlohmann::json j = a;
  EXPECT_EQ(j.dump(), R"({"type":2,"x":0.25,"y":0.75})");
  EXPECT_EQ(j.get<RawAction>(), a);
  EXPECT_THROW((nlohmann::json{{"type", 7}}.get<RawAction>()), Error);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.next(), b.next());
  Rng c(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = c.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(c.below(7), 7u);
  }
}

}  // namespace
}  // namespace touchboard
