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

#include "touchboard/agents.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace touchboard {

RandomPolicy::RandomPolicy(ActionSpace space, std::uint64_t seed)
    : space_(space), rng_(seed ^ 0x9e3779b97f4a7c15ULL) {}

AgentAction RandomPolicy::next() {
  switch (space_.kind) {
    case ActionSpaceKind::kRaw: {
      const auto type = static_cast<ActionType>(rng_.below(3));
      const double x = rng_.uniform01();
      const double y = rng_.uniform01();
      return RawAction{type, {x, y}};
    }
    case ActionSpaceKind::kDiscrete:
      return static_cast<int>(rng_.below(static_cast<std::uint64_t>(space_.grid.actions())));
    case ActionSpaceKind::kFloat: {
      const double v = rng_.uniform01();
      const double x = rng_.uniform01();
      const double y = rng_.uniform01();
      return FloatAction{v, {x, y}};
    }
  }
  return RawAction{};
}

RawAction scripted_catch(const ExtrasMap& extras) {
  const auto it = extras.find("ball_pos");
  if (it == extras.end() || it->second.empty() || it->second.back().values.size() < 2) {
    throw Error(ErrorCode::kMissingExtras, "scripted catch needs ball_pos extras");
  }
  const double ball_x = it->second.back().values[0];
  return {ActionType::kTouch, {ball_x, CatchParams{}.paddle_row}};
}

AgentAction ScriptedCatchPolicy::act(const AugmentedTimeStep&, EnvStack& env) {
  if (env.action_space().kind != ActionSpaceKind::kRaw) {
    throw Error(ErrorCode::kInvalidArgument, "scripted catch acts in the raw action space");
  }
  return scripted_catch(env.request_extras());
}

PolicyFactory policy_factory(const std::string& name) {
  if (name == "random") {
    return [](const ActionSpace& space, std::uint64_t seed) {
      return std::make_unique<RandomPolicy>(space, seed);
    };
  }
  if (name == "scripted") {
    return [](const ActionSpace&, std::uint64_t) { return std::make_unique<ScriptedCatchPolicy>(); };
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown policy '" + name + "'");
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"task", r.task_id},
          {"policy", r.policy_id},
          {"episodes", r.episodes},
          {"mean_return", r.mean_return},
          {"stderr", r.stderr_return},
          {"seeds", r.seeds},
          {"mean_episode_steps", r.mean_episode_steps},
          {"returns", r.returns}};
}

EvalReport evaluate(const PolicyFactory& make_policy, const TaskSpec& task, int episodes_per_seed,
                    const std::vector<std::uint64_t>& seeds, const EvalOptions& options) {
  if (episodes_per_seed < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one episode");
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one seed");

  EvalReport report;
  report.task_id = task.id;
  report.seeds = seeds;
  double total_steps = 0.0;
  for (const std::uint64_t seed : seeds) {
    EngineConfig cfg = options.engine;
    cfg.seed = seed;
    Engine engine(cfg);
    engine.load_task(task);
    EnvStack env(engine, options.wrappers);
    std::unique_ptr<Policy> policy = make_policy(env.action_space(), seed);
    report.policy_id = policy->id();
    for (int ep = 0; ep < episodes_per_seed; ++ep) {
      AugmentedTimeStep ts = env.reset();
      double ret = 0.0;
      std::uint64_t steps = 0;
      while (!ts.timestep.last() && steps < options.max_steps_per_episode) {
        const AgentAction action = policy->act(ts, env);
        if (options.deliberation > 0) engine.advance(options.deliberation);
        ts = env.step(action);
        ret += ts.timestep.reward;
        ++steps;
      }
      report.returns.push_back(ret);
      total_steps += static_cast<double>(steps);
    }
  }
  const auto n = static_cast<double>(report.returns.size());
  report.episodes = static_cast<int>(report.returns.size());
  report.mean_return = std::accumulate(report.returns.begin(), report.returns.end(), 0.0) / n;
  report.mean_episode_steps = total_steps / n;
  if (report.returns.size() > 1) {
    double ss = 0.0;
    for (double r : report.returns) ss += (r - report.mean_return) * (r - report.mean_return);
    report.stderr_return = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return report;
}

double human_normalized(double agent, double random, double human) {
  if (human == random) {
    throw Error(ErrorCode::kDegenerateBaseline, "human and random baselines are equal");
  }
  return (agent - random) / (human - random);
}

std::string csv_header() { return "task,policy,mean,stderr,episodes,seeds"; }

std::string csv_row(const EvalReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << r.task_id << ',' << r.policy_id << ',' << r.mean_return << ',' << r.stderr_return << ','
      << r.episodes << ',';
  for (std::size_t i = 0; i < r.seeds.size(); ++i) out << (i ? ";" : "") << r.seeds[i];
  return out.str();
}

}  // namespace touchboard
