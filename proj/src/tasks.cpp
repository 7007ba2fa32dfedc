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

#include "touchboard/tasks.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "touchboard/apps.hpp"

#ifndef TOUCHBOARD_DEFAULT_TASK_DIR
#define TOUCHBOARD_DEFAULT_TASK_DIR "tasks"
#endif

namespace touchboard {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kSchemaError, field + ": " + why);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) schema_error(where + key, "unknown field");
  }
}

std::string require_string(const json& obj, const std::string& key) {
  if (!obj.contains(key)) schema_error(key, "missing");
  const json& v = obj.at(key);
  if (!v.is_string() || v.get<std::string>().empty()) schema_error(key, "expected a non-empty string");
  return v.get<std::string>();
}

double require_number(const json& v, const std::string& field) {
  if (!v.is_number()) schema_error(field, "expected a number");
  return v.get<double>();
}

std::vector<std::string> string_list(const json& v, const std::string& field,
                                     const std::set<std::string>& allowed) {
  if (!v.is_array()) schema_error(field, "expected an array of strings");
  std::vector<std::string> out;
  for (const json& item : v) {
    if (!item.is_string() || item.get<std::string>().empty()) {
      schema_error(field, "expected non-empty strings");
    }
    const auto s = item.get<std::string>();
    if (!allowed.empty() && !allowed.count(s)) schema_error(field, "unknown verb '" + s + "'");
    out.push_back(s);
  }
  return out;
}

GestureConfig parse_gestures(const json& v) {
  if (!v.is_object()) schema_error("gestures", "expected an object");
  reject_unknown(v,
                 {"tap_max_ms", "long_press_ms", "tap_slop", "swipe_min_dist", "swipe_max_ms", "scroll"},
                 "gestures.");
  GestureConfig cfg;
  if (v.contains("tap_max_ms")) cfg.tap_max_ms = require_number(v["tap_max_ms"], "gestures.tap_max_ms");
  if (v.contains("long_press_ms")) {
    cfg.long_press_ms = require_number(v["long_press_ms"], "gestures.long_press_ms");
  }
  if (v.contains("tap_slop")) cfg.tap_slop = require_number(v["tap_slop"], "gestures.tap_slop");
  if (v.contains("swipe_min_dist")) {
    cfg.swipe_min_dist = require_number(v["swipe_min_dist"], "gestures.swipe_min_dist");
  }
  if (v.contains("swipe_max_ms")) {
    cfg.swipe_max_ms = require_number(v["swipe_max_ms"], "gestures.swipe_max_ms");
  }
  if (v.contains("scroll")) {
    if (!v["scroll"].is_boolean()) schema_error("gestures.scroll", "expected a boolean");
    cfg.scroll = v["scroll"].get<bool>();
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    schema_error("gestures", e.detail());
  }
  return cfg;
}

}  // namespace

std::optional<double> TaskSpec::time_limit_seconds() const {
  for (const ResetTrigger& t : episode_end) {
    if (t.kind == ResetTrigger::Kind::kTimeLimit) return t.seconds;
  }
  return std::nullopt;
}

bool TaskSpec::resets_with(std::string_view verb) const {
  return std::find(on_reset.begin(), on_reset.end(), verb) != on_reset.end();
}

TaskSpec load_task(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) schema_error("(root)", "expected an object");
  reject_unknown(doc,
                 {"id", "app_id", "max_episode_seconds", "reward_rules", "episode_end_events", "extras",
                  "gestures", "setup", "on_reset"},
                 "");

  TaskSpec spec;
  spec.id = require_string(doc, "id");
  spec.app_id = require_string(doc, "app_id");

  if (!doc.contains("reward_rules")) schema_error("reward_rules", "missing");
  if (!doc["reward_rules"].is_array()) schema_error("reward_rules", "expected an array");
  for (const json& rule : doc["reward_rules"]) {
    if (!rule.is_object()) schema_error("reward_rules", "expected objects");
    reject_unknown(rule, {"event", "scale"}, "reward_rules.");
    RewardRule r;
    r.event = require_string(rule, "event");
    if (!rule.contains("scale")) schema_error("reward_rules.scale", "missing");
    r.scale = require_number(rule["scale"], "reward_rules.scale");
    spec.reward_rules.push_back(std::move(r));
  }

  if (doc.contains("episode_end_events")) {
    for (std::string& name : string_list(doc["episode_end_events"], "episode_end_events", {})) {
      spec.episode_end.push_back(ResetTrigger::on_event(std::move(name)));
    }
  }
  if (doc.contains("max_episode_seconds") && !doc["max_episode_seconds"].is_null()) {
    const double limit = require_number(doc["max_episode_seconds"], "max_episode_seconds");
    if (!(limit > 0.0)) schema_error("max_episode_seconds", "must be positive");
    spec.episode_end.push_back(ResetTrigger::time_limit(limit));
  }

  if (doc.contains("extras")) {
    const json& extras = doc["extras"];
    if (!extras.is_object()) schema_error("extras", "expected an object of shapes");
    for (const auto& [key, shape] : extras.items()) {
      if (!shape.is_array() || shape.empty()) schema_error("extras." + key, "expected a non-empty shape");
      std::vector<int> dims;
      for (const json& d : shape) {
        if (!d.is_number_integer() || d.get<int>() <= 0) {
          schema_error("extras." + key, "dimensions must be positive integers");
        }
        dims.push_back(d.get<int>());
      }
      spec.extras.emplace(key, std::move(dims));
    }
  }

  if (doc.contains("gestures")) spec.gestures = parse_gestures(doc["gestures"]);
  if (doc.contains("setup")) spec.setup = string_list(doc["setup"], "setup", {"check_app"});
  if (doc.contains("on_reset")) {
    spec.on_reset = string_list(doc["on_reset"], "on_reset", {"relaunch_app", "clear_logs"});
  }

  // Setup: with built-in apps, installing reduces to a registry lookup.
  if (!app_registered(spec.app_id)) {
    throw Error(ErrorCode::kUnknownApp, "task '" + spec.id + "' needs unknown app '" + spec.app_id + "'");
  }
  return spec;
}

TaskSpec load_task_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_task(buffer.str());
}

nlohmann::json task_to_json(const TaskSpec& spec) {
  json j;
  j["id"] = spec.id;
  j["app_id"] = spec.app_id;
  j["setup"] = spec.setup;
  j["on_reset"] = spec.on_reset;
  j["reward_rules"] = json::array();
  for (const RewardRule& r : spec.reward_rules) {
    j["reward_rules"].push_back({{"event", r.event}, {"scale", r.scale}});
  }
  j["episode_end_events"] = json::array();
  for (const ResetTrigger& t : spec.episode_end) {
    if (t.kind == ResetTrigger::Kind::kEvent) j["episode_end_events"].push_back(t.event);
  }
  if (auto limit = spec.time_limit_seconds()) {
    j["max_episode_seconds"] = *limit;
  } else {
    j["max_episode_seconds"] = nullptr;
  }
  j["extras"] = json::object();
  for (const auto& [key, shape] : spec.extras) j["extras"][key] = shape;
  j["gestures"] = spec.gestures;
  return j;
}

FoldResult fold_events(const std::vector<AppEvent>& events, const TaskSpec& spec,
                       double episode_elapsed_seconds) {
  FoldResult out;
  for (const AppEvent& e : events) {
    for (const RewardRule& rule : spec.reward_rules) {
      if (rule.event != e.name) continue;
      // String payloads carry no magnitude.
      if (const double* v = std::get_if<double>(&e.payload)) out.reward += *v * rule.scale;
    }
    for (const ResetTrigger& t : spec.episode_end) {
      if (t.kind == ResetTrigger::Kind::kEvent && t.event == e.name) out.ended = true;
    }
  }
  if (auto limit = spec.time_limit_seconds(); limit && episode_elapsed_seconds >= *limit) {
    out.ended = true;
  }
  return out;
}

void ExtrasAccumulator::add(const ExtrasSnapshot& snapshot) {
  for (const auto& [key, array] : snapshot) pending_[key].push_back(array);
}

ExtrasMap ExtrasAccumulator::take(const TaskSpec& spec) {
  ExtrasMap taken;
  taken.swap(pending_);
  ExtrasMap out;
  for (auto& [key, arrays] : taken) {
    const auto decl = spec.extras.find(key);
    if (decl == spec.extras.end()) continue;
    const std::size_t size = std::accumulate(decl->second.begin(), decl->second.end(), std::size_t{1},
                                             [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
    for (const NumericArray& a : arrays) {
      if (a.shape != decl->second || a.values.size() != size) {
        throw Error(ErrorCode::kShapeMismatch, "extras '" + key + "' does not match its declared shape");
      }
    }
    out.emplace(key, std::move(arrays));
  }
  return out;
}

ExtrasMap request_extras(const TaskSpec& spec, ExtrasAccumulator& accumulator) {
  return accumulator.take(spec);
}

TaskRegistry::TaskRegistry(const std::filesystem::path& dir) : dir_(dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, "task directory " + dir.string() + " does not exist");
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    TaskSpec spec = load_task_file(entry.path());
    std::string id = spec.id;
    tasks_.insert_or_assign(std::move(id), std::move(spec));
  }
}

std::vector<std::string> TaskRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, spec] : tasks_) out.push_back(id);
  return out;
}

bool TaskRegistry::contains(std::string_view id) const { return tasks_.find(id) != tasks_.end(); }

const TaskSpec& TaskRegistry::get(std::string_view id) const {
  const auto it = tasks_.find(id);
  if (it == tasks_.end()) throw Error(ErrorCode::kUnknownTask, "no task '" + std::string(id) + "'");
  return it->second;
}

std::filesystem::path default_task_dir() {
  if (const char* env = std::getenv("TOUCHBOARD_TASK_DIR"); env && *env) return env;
  return TOUCHBOARD_DEFAULT_TASK_DIR;
}

}  // namespace touchboard
