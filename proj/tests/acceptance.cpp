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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails or overruns its time budget.
//
//   acceptance <path-to-touchboard-cli>

#include <boost/asio.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "support/oracles.hpp"
#include "touchboard/agents.hpp"
#include "touchboard/client.hpp"
#include "touchboard/server.hpp"

namespace tb = touchboard;
using tb::Micros;

namespace {

// Thrown by check() with the first violated condition.
struct Failure {
  std::string what;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string cli_path;

const tb::TaskRegistry& registry() {
  static const tb::TaskRegistry r(tb::default_task_dir());
  return r;
}

tb::RawAction random_action(tb::Rng& rng) {
  return {static_cast<tb::ActionType>(rng.below(3)), {rng.uniform01(), rng.uniform01()}};
}

// --- criteria ---

std::string discrete_cardinality() {
  const tb::GridSpec grid{6, 9};
  check(grid.actions() == 108, "grid 6x9 does not give 108 actions");
  std::set<std::pair<int, std::pair<double, double>>> seen;
  for (int i = 0; i < grid.actions(); ++i) {
    const tb::RawAction a = tb::discrete_to_raw(i, grid);
    check(tb::raw_to_discrete(a, grid) == i, "encode(decode(" + std::to_string(i) + ")) != " + std::to_string(i));
    seen.insert({static_cast<int>(a.type), {a.position.x, a.position.y}});
  }
  check(seen.size() == 108, "decoded actions are not distinct");
  for (int bad : {-1, 108}) {
    bool threw = false;
    try {
      tb::discrete_to_raw(bad, grid);
    } catch (const tb::Error& e) {
      threw = e.code() == tb::ErrorCode::kIndexOutOfRange;
    }
    check(threw, "index " + std::to_string(bad) + " is not rejected");
  }
  return "108 indices, bijective";
}

std::string lift_equivalence() {
  const std::vector<std::string> ids = registry().ids();
  tb::Rng rng(2024);
  constexpr int kCases = 1000;
  int lifts_while_down = 0;
  for (int c = 0; c < kCases; ++c) {
    const tb::TaskSpec& task = registry().get(ids[rng.below(ids.size())]);
    tb::EngineConfig cfg;
    cfg.max_steps_per_second = 15.0;
    cfg.seed = rng.below(1u << 20);
    std::vector<tb::RawAction> prefix(rng.below(40));
    for (auto& a : prefix) a = random_action(rng);
    if (!prefix.empty() && rng.below(2)) prefix.back().type = tb::ActionType::kTouch;
    lifts_while_down += !prefix.empty() && prefix.back().type == tb::ActionType::kTouch;
    const tb::Position p1{rng.uniform01(), rng.uniform01()};
    const tb::Position p2{rng.uniform01(), rng.uniform01()};
    std::vector<tb::RawAction> suffix(5);
    for (auto& a : suffix) a = random_action(rng);

    tb::Engine a(cfg), b(cfg);
    a.load_task(task);
    b.load_task(task);
    a.reset();
    b.reset();
    for (const auto& act : prefix) {
      a.step(act);
      b.step(act);
    }
    tb::TimeStep ta = a.step(tb::RawAction{tb::ActionType::kLift, p1});
    tb::TimeStep tb_ = b.step(tb::RawAction{tb::ActionType::kLift, p2});
    for (std::size_t k = 0;; ++k) {
      const std::string where = task.id + " case " + std::to_string(c) + " step " + std::to_string(k);
      check(ta.observation.pixels == tb_.observation.pixels, "frames differ: " + where);
      check(ta.reward == tb_.reward && ta.step_type == tb_.step_type, "rewards differ: " + where);
      check(a.last_events() == b.last_events(), "events differ: " + where);
      if (k == suffix.size()) break;
      ta = a.step(suffix[k]);
      tb_ = b.step(suffix[k]);
    }
  }
  return std::to_string(kCases) + " cases, " + std::to_string(lifts_while_down) + " lifting a held pointer";
}

std::string pacing_accuracy() {
  tb::EngineConfig cfg;
  cfg.clock = tb::ClockMode::kRealtime;
  cfg.max_steps_per_second = 10.0;
  tb::Engine engine(cfg);
  engine.load_task(registry().get("catch_default"));
  engine.reset();
  double sum = 0.0;
  constexpr int kSteps = 200;
  const std::vector<tb::RawAction> none;
  for (int i = 0; i < kSteps; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    sum += static_cast<double>(engine.step(none).observation.timedelta);
  }
  const double mean_ms = sum / kSteps / 1000.0;
  std::ostringstream out;
  out << "mean timedelta " << mean_ms << " ms";
  check(std::abs(mean_ms - 100.0) <= 10.0, out.str());
  return out.str();
}

std::string realtime_independence() {
  const tb::TaskSpec& task = registry().get("catch_default");
  const tb::CatchParams params;
  constexpr int kTickHz = 60;
  const double per_tick = params.ball_speed / kTickHz;
  tb::Rng rng(77);
  int intervals = 0;
  double worst = 0.0;
  const auto ball_y = [](tb::Engine& e) { return e.request_extras().at("ball_pos").back().values.at(1); };
  for (int schedule = 0; schedule < 100; ++schedule) {
    tb::EngineConfig cfg;
    cfg.seed = schedule;
    tb::Engine engine(cfg);
    engine.load_task(task);
    engine.reset();
    double y = ball_y(engine);
    Micros t = 0;
    for (int i = 0; i < 30; ++i) {
      t += 1 + static_cast<Micros>(rng.below(500'000));
      const tb::TimeStep ts = engine.step_until({}, t);
      const double y2 = ball_y(engine);
      if (y2 >= y) {  // no respawn in between
        const double expected = params.ball_speed * static_cast<double>(ts.observation.timedelta) / 1e6;
        const double err = std::abs((y2 - y) - expected);
        worst = std::max(worst, err);
        check(err <= per_tick + 1e-12, "schedule " + std::to_string(schedule) + " step " + std::to_string(i) +
                                           ": displacement off by " + std::to_string(err));
        ++intervals;
      }
      y = y2;
    }
  }
  check(intervals > 2000, "too few intervals without a respawn");
  std::ostringstream out;
  out << intervals << " intervals, worst error " << worst / per_tick << " ticks";
  return out.str();
}

std::string gesture_round_trip() {
  tb::Rng rng(31);
  constexpr Micros kPeriods[] = {33'334, 50'000, 66'667, 100'000};
  const tb::Direction dirs[] = {tb::Direction::kUp, tb::Direction::kDown, tb::Direction::kLeft,
                                tb::Direction::kRight};
  const auto unit = [](tb::Direction d) -> tb::Position {
    switch (d) {
      case tb::Direction::kUp: return {0, -1};
      case tb::Direction::kDown: return {0, 1};
      case tb::Direction::kLeft: return {-1, 0};
      case tb::Direction::kRight: return {1, 0};
    }
    return {};
  };
  const auto inside = [](tb::Position p) { return p.x >= 0 && p.x <= 1 && p.y >= 0 && p.y <= 1; };
  const auto random_gesture = [&](tb::GestureKind kind) -> tb::GestureEvent {
    while (true) {
      const tb::Position p{rng.uniform01(), rng.uniform01()};
      const tb::Direction d = dirs[rng.below(4)];
      const tb::Position u = unit(d);
      switch (kind) {
        case tb::GestureKind::kTap: return tb::GestureEvent::tap(p);
        case tb::GestureKind::kLongPress: return tb::GestureEvent::long_press(p);
        case tb::GestureKind::kSwipe: {
          const double len = rng.uniform(0.15, 0.6);
          const double side = rng.uniform(-0.3, 0.3) * len;
          const tb::Position end{p.x + u.x * len + u.y * side, p.y + u.y * len + u.x * side};
          if (inside(end)) return tb::GestureEvent::swipe(d, p, end);
          break;
        }
        case tb::GestureKind::kDrag: {
          std::vector<tb::Position> path{p};
          const int n = 2 + static_cast<int>(rng.below(8));
          for (int i = 0; i < n; ++i) {
            const double ang = rng.uniform(0, 2 * M_PI);
            const double step = rng.uniform(0.03, 0.12);
            path.push_back({std::clamp(path.back().x + step * std::cos(ang), 0.0, 1.0),
                            std::clamp(path.back().y + step * std::sin(ang), 0.0, 1.0)});
          }
          return tb::GestureEvent::drag(path);
        }
        case tb::GestureKind::kScroll: {
          const double mag = rng.uniform(0.1, 0.6);
          if (inside({p.x + u.x * mag, p.y + u.y * mag})) return tb::GestureEvent::scroll(d, mag, p);
          break;
        }
      }
    }
  };

  int total = 0;
  for (tb::GestureKind kind : {tb::GestureKind::kTap, tb::GestureKind::kLongPress, tb::GestureKind::kSwipe,
                               tb::GestureKind::kDrag, tb::GestureKind::kScroll}) {
    tb::GestureConfig cfg;
    cfg.scroll = kind == tb::GestureKind::kScroll;
    int done = 0;
    int attempts = 0;
    while (done < 100) {
      check(++attempts < 1000, std::string(tb::gesture_kind_name(kind)) + ": generator rarely realizable");
      const tb::GestureEvent g = random_gesture(kind);
      std::vector<tb::TimedAction> actions;
      try {
        actions = tb::synthesize(g, cfg, kPeriods[rng.below(4)]);
      } catch (const tb::Error& e) {
        if (e.code() == tb::ErrorCode::kUnrealizable) continue;  // e.g. a drag that reads as aligned
        throw;
      }
      const auto out = tb::classify(tb::pointer_stream(actions), cfg);
      check(out.size() == 1 && out[0].kind == kind,
            std::string(tb::gesture_kind_name(kind)) + " did not round-trip (" + std::to_string(out.size()) +
                " gestures)");
      ++done;
    }
    total += done;
  }

  const tb::GestureConfig cfg;
  const auto at = static_cast<Micros>(cfg.long_press_ms * 1000);
  const std::vector<tb::PointerEvent> hold{{tb::PointerKind::kDown, tb::Position{0.4, 0.4}, 0},
                                           {tb::PointerKind::kUp, std::nullopt, at}};
  const auto out = tb::classify(hold, cfg);
  check(out.size() == 1 && out[0].kind == tb::GestureKind::kLongPress, "hold of exactly long_press_ms");
  return std::to_string(total) + " gestures plus the long-press boundary";
}

std::string oracle_2048() {
  int lines = 0;
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b)
      for (int c = 0; c < 9; ++c)
        for (int d = 0; d < 9; ++d) {
          const tb::Line4 line{a, b, c, d};
          const auto [want, score] = tb::oracle::slide_merge(line);
          const tb::MergeResult got = tb::merge_line(line);
          check(got.line == want && got.score == score,
                "merge_line differs on " + std::to_string(a) + std::to_string(b) + std::to_string(c) +
                    std::to_string(d));
          ++lines;
        }
  tb::Rng pick(4);
  tb::Board2048 board = tb::board_new(1);
  for (int i = 0; i < 10000; ++i) {
    if (!tb::board_has_move(board)) board = tb::board_new(static_cast<std::uint64_t>(i));
    const tb::Board2048 before = board;
    tb::board_apply_swipe(board, static_cast<tb::Direction>(pick.below(4)), 0);
    const std::int64_t delta = board.tile_sum() - before.tile_sum();
    check(board == before ? delta == 0 : (delta == 2 || delta == 4),
          "move " + std::to_string(i) + " changed the sum by " + std::to_string(delta));
  }
  return std::to_string(lines) + " lines, 10000 moves";
}

std::string oracle_vs_random() {
  const tb::TaskSpec& task = registry().get("catch_default");
  tb::EvalOptions opts;
  opts.engine.max_steps_per_second = 10.0;
  double seconds = 0.0;
  for (const tb::ResetTrigger& t : task.episode_end) {
    if (t.kind == tb::ResetTrigger::Kind::kTimeLimit) seconds = t.seconds;
  }
  check(seconds == 60.0, "catch_default is not a 60 s task");
  const std::int64_t arrivals = tb::oracle::catch_arrivals(
      static_cast<std::int64_t>(seconds * opts.engine.tick_hz), opts.engine.tick_hz,
      tb::CatchParams{}.ball_speed, tb::CatchParams{}.paddle_row);
  std::ostringstream out;
  out << arrivals << " arrivals;";
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto scripted = tb::evaluate(tb::policy_factory("scripted"), task, 20, {seed}, opts);
    const auto random = tb::evaluate(tb::policy_factory("random"), task, 20, {seed}, opts);
    for (double r : scripted.returns) {
      check(r == static_cast<double>(arrivals), "seed " + std::to_string(seed) + ": scripted returned " +
                                                    std::to_string(r) + " of " + std::to_string(arrivals));
    }
    check(random.mean_return < scripted.mean_return, "seed " + std::to_string(seed) + ": random not lower");
    out << " seed " << seed << " random " << random.mean_return;
  }
  return out.str();
}

std::string determinism_replay() {
  check(!cli_path.empty(), "no CLI path given");
  const auto dir = std::filesystem::temp_directory_path() / ("tb_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto run = [](const std::string& cmd, std::string& out) {
    out.clear();
    FILE* pipe = ::popen(cmd.c_str(), "r");
    check(pipe != nullptr, "cannot run " + cmd);
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    const int status = ::pclose(pipe);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  int n = 0;
  for (const std::string& id : registry().ids()) {
    const std::string file = (dir / (id + ".tbrc")).string();
    std::string out;
    const int rec = run("'" + cli_path + "' record --task " + id + " --policy random --episodes 3 --seed 11 --out '" +
                            file + "' 2>&1",
                        out);
    check(rec == 0, id + ": record exited " + std::to_string(rec) + ": " + out);
    const int rep = run("'" + cli_path + "' replay --in '" + file + "'", out);
    check(rep == 0 && out == "MATCH\n", id + ": replay exited " + std::to_string(rep) + ": " + out);
    ++n;
  }
  std::filesystem::remove_all(dir);
  return std::to_string(n) + " tasks x 3 episodes MATCH";
}

std::string transport_transparency() {
  namespace asio = boost::asio;
  tb::net::ServerConfig cfg;
  cfg.port = 0;
  tb::net::Server server(cfg);
  server.start();
  std::size_t steps = 0;
  {
    tb::net::RemoteEnvironment remote("127.0.0.1", server.port(), "controller");
    for (const std::string& id : registry().ids()) {
      remote.load_task(id);
      tb::Engine local;
      local.load_task(registry().get(id));
      tb::Rng rng(3);
      tb::TimeStep a = remote.reset();
      tb::TimeStep b = local.reset();
      for (int i = 0;; ++i) {
        const std::string where = id + " step " + std::to_string(i);
        check(a.observation.pixels == b.observation.pixels, "frames differ: " + where);
        check(a.reward == b.reward && a.step_type == b.step_type && a.discount == b.discount,
              "scalars differ: " + where);
        check(a.observation.timedelta == b.observation.timedelta, "timedelta differs: " + where);
        if (i == 100) break;
        const tb::RawAction act = random_action(rng);
        const auto think = static_cast<Micros>(rng.below(200'000));
        remote.advance(think);
        local.advance(think);
        a = remote.step(act);
        b = local.step(act);
        ++steps;
      }
      check(remote.request_extras() == local.request_extras(), "extras differ: " + id);
    }
  }

  // Fuzz: random bytes, truncated valid messages and bogus length prefixes.
  tb::Rng rng(1234);
  const std::string valid = [] {
    const auto bytes = tb::net::encode(tb::net::Message::make(
        tb::net::Tag::kHello, {{"version", tb::net::kProtocolVersion}, {"role", "controller"}}));
    return std::string(bytes.begin(), bytes.end());
  }();
  for (int i = 0; i < 300; ++i) {
    std::string junk;
    switch (i % 4) {
      case 0:
        junk.resize(1 + rng.below(512));
        for (char& c : junk) c = static_cast<char>(rng.below(256));
        break;
      case 1:
        junk = valid.substr(0, rng.below(valid.size()));
        break;
      case 2:
        junk = std::string("\x7f\xff\xff\xff", 4) + "x";
        break;
      case 3:
        junk = "GET /" + std::to_string(rng.next()) + " HTTP/1.1\r\nUpgrade: websocket\r\n" +
               std::string(rng.below(64), 'z');
        break;
    }
    asio::io_context ioc;
    asio::ip::tcp::socket socket(ioc);
    socket.connect({asio::ip::make_address("127.0.0.1"), server.port()});
    boost::system::error_code ec;
    asio::write(socket, asio::buffer(junk), ec);
  }
  tb::net::RemoteEnvironment after("127.0.0.1", server.port(), "controller");
  check(after.list_tasks().size() == registry().ids().size(), "server unusable after fuzz");
  after.load_task("catch_default");
  check(after.reset().first(), "reset failed after fuzz");
  server.stop();
  return std::to_string(steps) + " remote steps identical; 300 fuzz connections survived";
}

std::string rescale_correctness() {
  tb::Rng rng(8);
  for (tb::Rgb c : {tb::Rgb{0, 0, 0}, tb::Rgb{255, 255, 255}, tb::Rgb{17, 130, 201}}) {
    const tb::FrameBuffer solid(240, 360, c);
    check(tb::rescale(solid, 80, 120) == tb::FrameBuffer(80, 120, c), "constant image is not a fixed point");
  }
  double worst = 0.0;
  for (int f = 0; f < 100; ++f) {
    tb::FrameBuffer src(240, 360);
    if (f % 2 == 0) {
      for (auto& v : src.data()) v = static_cast<std::uint8_t>(rng.below(256));
    } else {
      for (int r = 0; r < 12; ++r) {
        const tb::Rgb c{static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
                        static_cast<std::uint8_t>(rng.below(256))};
        const double x = rng.uniform01(), y = rng.uniform01();
        src.fill_rect(x, y, x + rng.uniform(0, 0.5), y + rng.uniform(0, 0.5), c);
      }
    }
    const tb::FrameBuffer out = tb::rescale(src, 80, 120);
    check(out.width() == 80 && out.height() == 120 && out.valid(), "output is not 80x120");
    for (int ch = 0; ch < 3; ++ch) {
      double oracle = 0.0;
      for (int y = 0; y < 120; ++y)
        for (int x = 0; x < 80; ++x) oracle += tb::oracle::box_filter_value(src, 80, 120, x, y, ch);
      oracle /= 80.0 * 120.0;
      const double err = std::abs(tb::oracle::channel_mean(out, ch) - oracle);
      worst = std::max(worst, err);
      check(err <= 1.0, "frame " + std::to_string(f) + " channel " + std::to_string(ch) + " mean off by " +
                            std::to_string(err));
    }
  }
  std::ostringstream out;
  out << "100 frames, worst channel-mean error " << worst;
  return out.str();
}

std::string human_normalization() {
  check(tb::human_normalized(7.5, -2.0, 7.5) == 1.0, "agent == human is not 1");
  check(tb::human_normalized(-2.0, -2.0, 7.5) == 0.0, "agent == random is not 0");
  tb::Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double agent = rng.uniform(-100, 100), random = rng.uniform(-100, 100);
    double human = rng.uniform(-100, 100);
    if (std::abs(human - random) < 1e-3) human = random + 1.0;
    double a = rng.uniform(-10, 10);
    if (std::abs(a) < 1e-3) a = 1.0;
    const double b = rng.uniform(-1000, 1000);
    const double base = tb::human_normalized(agent, random, human);
    const double moved = tb::human_normalized(a * agent + b, a * random + b, a * human + b);
    check(std::abs(base - moved) <= 1e-6 * std::max(1.0, std::abs(base)),
          "affine triple " + std::to_string(i) + " changed the score");
  }
  return "anchors exact, 1000 affine triples";
}

struct Criterion {
  std::string name;
  double limit_s;
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) cli_path = argv[1];
  const std::vector<Criterion> criteria = {
      {"discrete_cardinality", 1, discrete_cardinality},
      {"lift_equivalence", 30, lift_equivalence},
      {"pacing_accuracy", 60, pacing_accuracy},
      {"realtime_independence", 10, realtime_independence},
      {"gesture_round_trip", 10, gesture_round_trip},
      {"oracle_2048", 10, oracle_2048},
      {"oracle_vs_random", 120, oracle_vs_random},
      {"determinism_replay", 60, determinism_replay},
      {"transport_transparency", 60, transport_transparency},
      {"rescale_correctness", 10, rescale_correctness},
      {"human_normalization", 1, human_normalization},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && secs > c.limit_s) {
      ok = false;
      detail += " (over the " + std::to_string(static_cast<int>(c.limit_s)) + " s budget)";
    }
    failed += !ok;
    std::printf("%s %s [%.2fs] %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), secs, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
