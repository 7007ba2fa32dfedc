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

// Command-line entry point: serve, list-tasks, run, benchmark, record, replay.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "touchboard/agents.hpp"
#include "touchboard/recording.hpp"
#include "touchboard/server.hpp"

namespace tb = touchboard;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

struct EngineFlags {
  std::string clock = "virtual";
  double rate = 0.0;  // 0: unpaced
  int tick_hz = 60;
  std::uint64_t seed = 0;

  void add(CLI::App* cmd, const std::string& default_clock, double default_rate) {
    clock = default_clock;
    rate = default_rate;
    cmd->add_option("--clock", clock, "real or virtual")->check(CLI::IsMember({"real", "virtual"}))->capture_default_str();
    cmd->add_option("--max-steps-per-second", rate, "pacing rate; 0 disables pacing")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--tick-hz", tick_hz, "simulation tick rate")->check(CLI::Range(30, 240))->capture_default_str();
    cmd->add_option("--seed", seed, "environment seed")->capture_default_str();
  }

  tb::EngineConfig config() const {
    tb::EngineConfig cfg;
    if (rate > 0) cfg.max_steps_per_second = rate;
    cfg.tick_hz = tick_hz;
    cfg.clock = tb::parse_clock_mode(clock);
    cfg.seed = seed;
    return cfg;
  }
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--seeds", "not a seed: '" + item + "'");
    }
  }
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
  return seeds;
}

tb::EvalOptions eval_options(const EngineFlags& engine, const std::string& wrappers, double deliberation_ms) {
  tb::EvalOptions opts;
  opts.engine = engine.config();
  if (opts.engine.clock != tb::ClockMode::kVirtual) {
    throw tb::Error(tb::ErrorCode::kInvalidArgument, "agent runs use the virtual clock");
  }
  opts.wrappers = tb::parse_wrapper_list(wrappers);
  opts.deliberation = static_cast<tb::Micros>(deliberation_ms * 1000.0);
  return opts;
}

// The scripted policy needs catch extras and raw actions.
bool scripted_applies(const tb::TaskSpec& task) { return task.app_id == "catch"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"touchboard: real-time touchscreen environments for agents"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve one environment over TCP (and WebSocket for the UI)");
  EngineFlags serve_engine;
  serve_engine.add(serve, "real", 0.0);
  std::uint16_t port = tb::net::kDefaultPort;
  std::string host = "127.0.0.1";
  std::string serve_task;
  std::string ui_dir;
  std::string record_dir = ".";
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "address to bind")->capture_default_str();
  serve->add_option("--task", serve_task, "task to load at startup");
  serve->add_option("--ui", ui_dir, "directory with the browser client to serve over HTTP")->check(CLI::ExistingDirectory);
  serve->add_option("--record-dir", record_dir, "where record_start writes recordings")->capture_default_str();

  // list-tasks
  auto* list = app.add_subcommand("list-tasks", "List the shipped tasks");

  // run
  auto* run = app.add_subcommand("run", "Evaluate a policy on a task and print the report as JSON");
  EngineFlags run_engine;
  run_engine.add(run, "virtual", 10.0);
  std::string run_task;
  std::string policy = "random";
  int episodes = 1;
  std::string wrappers;
  double deliberation_ms = 0.0;
  run->add_option("--task", run_task, "task id")->required();
  run->add_option("--policy", policy, "random or scripted")->check(CLI::IsMember({"random", "scripted"}))->capture_default_str();
  run->add_option("--episodes", episodes, "episodes per seed")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--wrappers", wrappers, "e.g. discrete:6x9,rescale:80x120,last_action");
  run->add_option("--deliberation-ms", deliberation_ms, "virtual time spent deciding before each step")
      ->check(CLI::NonNegativeNumber);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Every shipped task against every policy, as CSV");
  EngineFlags bench_engine;
  bench_engine.add(bench, "virtual", 10.0);
  bool suite = false;
  int bench_episodes = 5;
  std::string seeds_text = "1,2,3,4";
  std::string csv_out;
  std::string bench_wrappers;
  std::string human_dir;
  bench->add_flag("--suite", suite, "run the shipped suite")->required();
  bench->add_option("--episodes", bench_episodes, "episodes per seed")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--seeds", seeds_text, "comma-separated seeds")->capture_default_str();
  bench->add_option("--out", csv_out, "CSV file (default: stdout)");
  bench->add_option("--wrappers", bench_wrappers, "wrapper stack for every run");
  bench->add_option("--human-dir", human_dir, "recordings of human play; adds a normalized-score column")
      ->check(CLI::ExistingDirectory);

  // record
  auto* record = app.add_subcommand("record", "Record episodes from a policy, or capture a controller session");
  EngineFlags record_engine;
  record_engine.add(record, "virtual", 10.0);
  std::string record_task;
  std::string record_out;
  std::string record_policy = "human";
  int record_episodes = 1;
  std::string record_wrappers;
  std::uint16_t record_port = tb::net::kDefaultPort;
  std::string record_ui;
  record->add_option("--task", record_task, "task id")->required();
  record->add_option("--out", record_out, "recording file")->required();
  record->add_option("--policy", record_policy,
                     "random or scripted to record locally; human serves and captures the first controller")
      ->check(CLI::IsMember({"random", "scripted", "human"}))
      ->capture_default_str();
  record->add_option("--episodes", record_episodes, "episodes (policy runs)")->check(CLI::PositiveNumber)->capture_default_str();
  record->add_option("--wrappers", record_wrappers, "wrapper stack (policy runs)");
  record->add_option("--port", record_port, "TCP port (human capture)")->capture_default_str();
  record->add_option("--ui", record_ui, "browser client directory (human capture)")->check(CLI::ExistingDirectory);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Re-drive a recording on the virtual clock and compare");
  std::string replay_in;
  replay_cmd->add_option("--in", replay_in, "recording file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "\n" << app.help();
    return kUsageError;
  }

  try {
    if (*list) {
      const tb::TaskRegistry registry(tb::default_task_dir());
      for (const std::string& id : registry.ids()) std::cout << id << "\t" << registry.get(id).app_id << "\n";
      return 0;
    }

    if (*serve) {
      tb::net::ServerConfig cfg;
      cfg.host = host;
      cfg.port = port;
      cfg.engine = serve_engine.config();
      if (!serve_task.empty()) cfg.initial_task = serve_task;
      if (!ui_dir.empty()) cfg.ui_dir = ui_dir;
      cfg.record_dir = record_dir;
      tb::net::Server server(cfg);
      server.start();
      std::cerr << "serving on " << host << ":" << server.port() << (cfg.ui_dir ? " (UI at http://" + host + ":" + std::to_string(server.port()) + "/)" : "") << "\n";
      server.run_until_signal();
      return 0;
    }

    if (*run) {
      const tb::TaskRegistry registry(tb::default_task_dir());
      const tb::TaskSpec& task = registry.get(run_task);
      const tb::EvalOptions opts = eval_options(run_engine, wrappers, deliberation_ms);
      const tb::EvalReport report = tb::evaluate(tb::policy_factory(policy), task, episodes, {run_engine.seed}, opts);
      std::cout << tb::to_json(report).dump(2) << "\n";
      return 0;
    }

    if (*bench) {
      const tb::TaskRegistry registry(tb::default_task_dir());
      const auto seeds = parse_seeds(seeds_text);
      const tb::EvalOptions opts = eval_options(bench_engine, bench_wrappers, 0.0);
      std::map<std::string, std::vector<tb::EpisodeRecording>> human;
      if (!human_dir.empty()) {
        for (const auto& entry : std::filesystem::directory_iterator(human_dir)) {
          if (entry.path().extension() != ".tbrc") continue;
          tb::EpisodeRecording rec = tb::EpisodeRecording::load(entry.path());
          human[rec.header.task.id].push_back(std::move(rec));
        }
      }
      std::ofstream file;
      if (!csv_out.empty()) {
        file.open(csv_out);
        if (!file) throw tb::Error(tb::ErrorCode::kIoError, "cannot write " + csv_out);
      }
      std::ostream& out = csv_out.empty() ? std::cout : file;
      out << tb::csv_header() << (human.empty() ? "" : ",human_normalized") << "\n";
      for (const std::string& id : registry.ids()) {
        const tb::TaskSpec& task = registry.get(id);
        const tb::EvalReport random = tb::evaluate(tb::policy_factory("random"), task, bench_episodes, seeds, opts);
        std::vector<tb::EvalReport> reports{random};
        if (scripted_applies(task) && opts.wrappers.empty()) {
          reports.push_back(tb::evaluate(tb::policy_factory("scripted"), task, bench_episodes, seeds, opts));
        }
        for (const tb::EvalReport& r : reports) {
          out << tb::csv_row(r);
          if (!human.empty()) {
            out << ",";
            if (const auto it = human.find(id); it != human.end()) {
              out << tb::human_normalized(r.mean_return, random.mean_return, tb::human_baseline(it->second));
            }
          }
          out << "\n";
        }
      }
      return 0;
    }

    if (*record) {
      const tb::TaskRegistry registry(tb::default_task_dir());
      const tb::TaskSpec& task = registry.get(record_task);
      if (record_policy != "human") {
        const tb::EvalOptions opts = eval_options(record_engine, record_wrappers, 0.0);
        const tb::EpisodeRecording rec =
            tb::record_episodes(tb::policy_factory(record_policy), task, record_episodes, opts);
        rec.save(record_out);
        std::cerr << "recorded " << rec.steps.size() << " steps to " << record_out << "\n";
        return 0;
      }
      tb::net::ServerConfig cfg;
      cfg.port = record_port;
      cfg.engine = record_engine.config();
      cfg.initial_task = task.id;
      cfg.capture_to = record_out;
      if (!record_ui.empty()) cfg.ui_dir = record_ui;
      tb::net::Server server(cfg);
      server.start();
      std::cerr << "waiting for a controller on port " << server.port() << "; disconnect to finish\n";
      while (!server.last_recording()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
      server.stop();
      std::cerr << "recorded to " << record_out << "\n";
      return 0;
    }

    if (*replay_cmd) {
      const tb::EpisodeRecording rec = tb::EpisodeRecording::load(replay_in);
      const tb::ReplayResult result = tb::replay(rec);
      if (result.match) {
        std::cout << "MATCH\n";
        return 0;
      }
      std::cout << "MISMATCH at step " << *result.divergent_step << ": " << result.reason << "\n";
      return kRuntimeError;
    }
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
