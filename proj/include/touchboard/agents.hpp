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

#ifndef TOUCHBOARD_AGENTS_HPP_
#define TOUCHBOARD_AGENTS_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "touchboard/engine.hpp"
#include "touchboard/wrappers.hpp"

namespace touchboard {

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string id() const = 0;
  virtual AgentAction act(const AugmentedTimeStep& last, EnvStack& env) = 0;
};

// Uniform over the action space, deterministic per seed. Raw actions draw the
// type from {TOUCH, LIFT, REPEAT} and the position from the unit square.
class RandomPolicy final : public Policy {
 public:
  RandomPolicy(ActionSpace space, std::uint64_t seed);

  std::string id() const override { return "random"; }
  AgentAction act(const AugmentedTimeStep&, EnvStack&) override { return next(); }
  AgentAction next();

 private:
  ActionSpace space_;
  Rng rng_;
};

// TOUCH at (ball_x, paddle row) using the latest catch extras.
// Throws Error(kMissingExtras) without a ball_pos entry.
RawAction scripted_catch(const ExtrasMap& extras);

class ScriptedCatchPolicy final : public Policy {
 public:
  std::string id() const override { return "scripted"; }
  AgentAction act(const AugmentedTimeStep& last, EnvStack& env) override;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(const ActionSpace& space, std::uint64_t seed)>;

// "random" or "scripted"; throws kInvalidArgument for anything else.
PolicyFactory policy_factory(const std::string& name);

struct EvalReport {
  std::string task_id;
  std::string policy_id;
  int episodes = 0;
  double mean_return = 0.0;
  double stderr_return = 0.0;
  std::vector<std::uint64_t> seeds;
  double mean_episode_steps = 0.0;
  std::vector<double> returns;  // one per episode, seed-major
};

nlohmann::json to_json(const EvalReport& report);

struct EvalOptions {
  EngineConfig engine;  // seed is replaced per evaluation seed
  std::vector<WrapperDecl> wrappers;
  Micros deliberation = 0;  // VIRTUAL clock only: advanced before each step
  std::uint64_t max_steps_per_episode = 1'000'000;
};

// Runs `episodes_per_seed` episodes for every seed and aggregates undiscounted
// returns. Throws kInvalidArgument when there is nothing to run.
EvalReport evaluate(const PolicyFactory& policy, const TaskSpec& task, int episodes_per_seed,
                    const std::vector<std::uint64_t>& seeds, const EvalOptions& options = {});

// (agent - random) / (human - random). Throws kDegenerateBaseline when the two
// baselines coincide.
double human_normalized(double agent, double random, double human);

std::string csv_header();
std::string csv_row(const EvalReport& report);

}  // namespace touchboard

#endif  // TOUCHBOARD_AGENTS_HPP_
