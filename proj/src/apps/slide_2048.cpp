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

#include <algorithm>

#include "touchboard/apps.hpp"

namespace touchboard {
namespace {

constexpr Rgb kBackground{187, 173, 160};
constexpr Rgb kEmpty{205, 193, 180};

Rgb tile_color(int exponent) {
  static constexpr std::array<Rgb, 12> kPalette{{
      {238, 228, 218}, {237, 224, 200}, {242, 177, 121}, {245, 149, 99},
      {246, 124, 95},  {246, 94, 59},   {237, 207, 114}, {237, 204, 97},
      {237, 200, 80},  {237, 197, 63},  {237, 194, 46},  {60, 58, 50},
  }};
  return kPalette[static_cast<std::size_t>(std::min(exponent, 12) - 1)];
}

// Cell (row, col) of line `i`, element `k`, with k = 0 at the side the tiles
// slide toward.
std::pair<int, int> line_cell(Direction dir, int i, int k) {
  switch (dir) {
    case Direction::kLeft: return {i, k};
    case Direction::kRight: return {i, 3 - k};
    case Direction::kUp: return {k, i};
    case Direction::kDown: return {3 - k, i};
  }
  return {0, 0};
}

}  // namespace

MergeResult merge_line(const Line4& line) {
  MergeResult out;
  std::size_t write = 0;
  int held = 0;  // last compacted tile still open for a merge
  for (int v : line) {
    if (v == 0) continue;
    if (held == v) {
      out.line[write++] = v + 1;
      out.score += std::int64_t{1} << (v + 1);
      held = 0;
    } else {
      if (held != 0) out.line[write++] = held;
      held = v;
    }
  }
  if (held != 0) out.line[write] = held;
  return out;
}

std::int64_t Board2048::tile_sum() const {
  std::int64_t sum = 0;
  for (const Line4& row : cells) {
    for (int e : row) {
      if (e > 0) sum += std::int64_t{1} << e;
    }
  }
  return sum;
}

void board_spawn(Board2048& board) {
  std::vector<std::pair<int, int>> empty;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (board.cells[r][c] == 0) empty.emplace_back(r, c);
    }
  }
  if (empty.empty()) return;
  const auto [r, c] = empty[board.rng.below(empty.size())];
  board.cells[r][c] = board.rng.uniform01() < 0.9 ? 1 : 2;
}

Board2048 board_new(std::uint64_t seed) {
  Board2048 board;
  board.rng = Rng(seed);
  board_spawn(board);
  board_spawn(board);
  return board;
}

bool board_has_move(const Board2048& board) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const int v = board.cells[r][c];
      if (v == 0) return true;
      if (c + 1 < 4 && board.cells[r][c + 1] == v) return true;
      if (r + 1 < 4 && board.cells[r + 1][c] == v) return true;
    }
  }
  return false;
}

std::vector<AppEvent> board_apply_swipe(Board2048& board, Direction dir, Micros now) {
  std::int64_t score = 0;
  bool changed = false;
  for (int i = 0; i < 4; ++i) {
    Line4 line{};
    for (int k = 0; k < 4; ++k) {
      const auto [r, c] = line_cell(dir, i, k);
      line[k] = board.cells[r][c];
    }
    const MergeResult merged = merge_line(line);
    if (merged.line != line) changed = true;
    score += merged.score;
    for (int k = 0; k < 4; ++k) {
      const auto [r, c] = line_cell(dir, i, k);
      board.cells[r][c] = merged.line[k];
    }
  }
  std::vector<AppEvent> events;
  if (!changed) return events;
  board_spawn(board);
  events.push_back({now, "score", static_cast<double>(score)});
  if (!board_has_move(board)) events.push_back({now, "episode_end", 1.0});
  return events;
}

void Slide2048App::reseed(std::uint64_t seed) {
  board_ = board_new(seed);
  clear_events();
}

void Slide2048App::handle_gesture(const GestureEvent& gesture) {
  if (gesture.kind != GestureKind::kSwipe) return;
  emit_all(board_apply_swipe(board_, gesture.direction, time()));
}

void Slide2048App::render(FrameBuffer& into) const {
  into.fill(kBackground);
  // Square board centred vertically; cell size in width units.
  constexpr double kMargin = 0.03;
  const double aspect = static_cast<double>(into.width()) / into.height();
  const double cell = (1.0 - 5 * kMargin) / 4;
  const double top = 0.5 - 0.5 * aspect;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double x0 = kMargin + c * (cell + kMargin);
      const double y0 = top + (kMargin + r * (cell + kMargin)) * aspect;
      const int e = board_.cells[r][c];
      into.fill_rect(x0, y0, x0 + cell, y0 + cell * aspect, e == 0 ? kEmpty : tile_color(e));
    }
  }
}

ExtrasSnapshot Slide2048App::extras() const {
  NumericArray grid{{4, 4}, {}};
  for (const Line4& row : board_.cells) {
    for (int e : row) grid.values.push_back(e);
  }
  return {{"grid", std::move(grid)}};
}

}  // namespace touchboard
