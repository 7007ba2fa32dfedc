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

#include <mutex>
#include <map>

#include "touchboard/apps.hpp"

namespace touchboard {
namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, AppFactory, std::less<>> factories;

  Registry() {
    factories.emplace("catch", [] { return std::make_unique<CatchApp>(); });
    factories.emplace("press_button", [] { return std::make_unique<ButtonApp>(); });
    factories.emplace("slide_2048", [] { return std::make_unique<Slide2048App>(); });
    factories.emplace("drag_match", [] { return std::make_unique<DragMatchApp>(); });
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

std::vector<AppEvent> App::drain_events() {
  std::vector<AppEvent> out;
  out.swap(log_);
  return out;
}

void App::emit(std::string name, EventPayload payload) {
  log_.push_back({now_, std::move(name), std::move(payload)});
}

void App::emit_all(std::vector<AppEvent> events) {
  for (AppEvent& e : events) log_.push_back(std::move(e));
}

std::unique_ptr<App> make_app(std::string_view id) {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  const auto it = r.factories.find(id);
  if (it == r.factories.end()) {
    throw Error(ErrorCode::kUnknownApp, "no app registered as '" + std::string(id) + "'");
  }
  return it->second();
}

bool app_registered(std::string_view id) {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  return r.factories.find(id) != r.factories.end();
}

std::vector<std::string> registered_apps() {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> ids;
  for (const auto& [id, factory] : r.factories) ids.push_back(id);
  return ids;
}

void register_app(std::string id, AppFactory factory) {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[std::move(id)] = std::move(factory);
}

}  // namespace touchboard
