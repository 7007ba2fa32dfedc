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

#ifndef TOUCHBOARD_TASKS_HPP_
#define TOUCHBOARD_TASKS_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "touchboard/core.hpp"
#include "touchboard/touch.hpp"

namespace touchboard {

struct RewardRule {
  std::string event;
  double scale = 1.0;
};

struct ResetTrigger {
  enum class Kind { kEvent, kTimeLimit };

  Kind kind = Kind::kEvent;
  std::string event;     // kEvent
  double seconds = 0.0;  // kTimeLimit

  static ResetTrigger on_event(std::string name) { return {Kind::kEvent, std::move(name), 0.0}; }
  static ResetTrigger time_limit(double s) { return {Kind::kTimeLimit, {}, s}; }
};

// Declarative task: which app, how it is reset, how app events become rewards
// and episode ends, and which extras may be requested.
struct TaskSpec {
  std::string id;
  std::string app_id;
  // Setup verbs run once when the task is loaded. Only "check_app" exists.
  std::vector<std::string> setup{"check_app"};
  // Reset verbs: "relaunch_app" reseeds the app from the episode seed,
  // "clear_logs" drops undelivered app events.
  std::vector<std::string> on_reset{"relaunch_app", "clear_logs"};
  std::vector<RewardRule> reward_rules;
  std::vector<ResetTrigger> episode_end;
  std::map<std::string, std::vector<int>> extras;
  GestureConfig gestures;

  std::optional<double> time_limit_seconds() const;
  bool resets_with(std::string_view verb) const;
};

// Parses and validates a task file.
// Throws Error with kParseError, kUnknownApp or kSchemaError.
TaskSpec load_task(std::string_view text);
TaskSpec load_task_file(const std::filesystem::path& path);

nlohmann::json task_to_json(const TaskSpec& spec);

struct FoldResult {
  double reward = 0.0;
  bool ended = false;
};

// Sums payload * scale over events with a matching reward rule; ends the
// episode on any trigger event or once the time limit is reached.
FoldResult fold_events(const std::vector<AppEvent>& events, const TaskSpec& spec,
                       double episode_elapsed_seconds);

// Extras snapshots gathered between explicit requests.
class ExtrasAccumulator {
 public:
  void add(const ExtrasSnapshot& snapshot);
  // Returns everything since the last request and empties the accumulator.
  // Keys the task does not declare are dropped. Throws kShapeMismatch.
  ExtrasMap take(const TaskSpec& spec);
  void clear() { pending_.clear(); }
  bool empty() const { return pending_.empty(); }

 private:
  ExtrasMap pending_;
};

ExtrasMap request_extras(const TaskSpec& spec, ExtrasAccumulator& accumulator);

// Task files in a directory, keyed by the "id" field.
class TaskRegistry {
 public:
  explicit TaskRegistry(const std::filesystem::path& dir);

  std::vector<std::string> ids() const;
  const TaskSpec& get(std::string_view id) const;  // throws kUnknownTask
  bool contains(std::string_view id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::map<std::string, TaskSpec, std::less<>> tasks_;
};

// $TOUCHBOARD_TASK_DIR if set, else the tasks/ directory of the source tree.
std::filesystem::path default_task_dir();

}  // namespace touchboard

#endif  // TOUCHBOARD_TASKS_HPP_
