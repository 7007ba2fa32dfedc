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

#ifndef TOUCHBOARD_WRAPPERS_HPP_
#define TOUCHBOARD_WRAPPERS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "touchboard/environment.hpp"

namespace touchboard {

// Screen grid for the discrete action space. Portrait screens get fewer
// columns than rows.
struct GridSpec {
  int cols = 6;
  int rows = 9;

  int cells() const { return cols * rows; }
  int actions() const { return 2 * cells(); }
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Indices [0, cells) touch a cell centre, [cells, 2 * cells) lift there.
// Throws Error(kIndexOutOfRange).
RawAction discrete_to_raw(int index, const GridSpec& grid);
// Inverse of discrete_to_raw for TOUCH/LIFT actions: the cell containing the
// position, offset by cells() for LIFT.
int raw_to_discrete(const RawAction& action, const GridSpec& grid);

// Rounds `type_value` to the nearest integer, ties up: 0 is TOUCH, 1 is LIFT.
// Throws Error(kOutOfRange) outside [0, 1].
RawAction float_to_raw(double type_value, Position position);

// Box-filter downsampling (exact area average, rounded) per axis; an axis
// that grows uses nearest neighbour.
FrameBuffer rescale(const FrameBuffer& pixels, int target_width, int target_height);

// Length cells() + 1: one-hot cell of the last discrete action, then a bit
// that is 1 when that action was a TOUCH. All zeros without history.
std::vector<float> last_action_encoding(std::optional<int> last, const GridSpec& grid);

struct AugmentedObservation {
  Observation observation;
  std::vector<float> last_action;
};

AugmentedObservation last_action_overlay(const Observation& obs, std::optional<int> last,
                                         const GridSpec& grid);

// Observation wrapper: every frame is resized to width x height.
class ImageRescaleWrapper final : public Environment {
 public:
  ImageRescaleWrapper(Environment& inner, int width, int height);

  TimeStep reset() override;
  using Environment::step;
  TimeStep step(std::span<const RawAction> actions) override;
  ExtrasMap request_extras() override { return inner_.request_extras(); }

 private:
  TimeStep resize(TimeStep ts) const;

  Environment& inner_;
  int width_;
  int height_;
};

class DiscreteActionWrapper {
 public:
  DiscreteActionWrapper(Environment& inner, GridSpec grid);

  TimeStep reset() { return inner_.reset(); }
  TimeStep step(int index);
  ExtrasMap request_extras() { return inner_.request_extras(); }
  const GridSpec& grid() const { return grid_; }

 private:
  Environment& inner_;
  GridSpec grid_;
};

class FloatActionWrapper {
 public:
  explicit FloatActionWrapper(Environment& inner) : inner_(inner) {}

  TimeStep reset() { return inner_.reset(); }
  TimeStep step(double type_value, Position position);
  ExtrasMap request_extras() { return inner_.request_extras(); }

 private:
  Environment& inner_;
};

struct AugmentedTimeStep {
  TimeStep timestep;
  std::vector<float> last_action;
};

// Discrete actions plus the one-hot of the previous action on every step.
class LastActionWrapper {
 public:
  explicit LastActionWrapper(DiscreteActionWrapper& inner) : inner_(inner) {}

  AugmentedTimeStep reset();
  AugmentedTimeStep step(int index);
  ExtrasMap request_extras() { return inner_.request_extras(); }

 private:
  DiscreteActionWrapper& inner_;
  std::optional<int> last_;
};

// --- declarative stacks ------------------------------------------------------

enum class ActionSpaceKind { kRaw, kDiscrete, kFloat };

struct ActionSpace {
  ActionSpaceKind kind = ActionSpaceKind::kRaw;
  GridSpec grid;  // kDiscrete only
};

struct FloatAction {
  double type_value = 0.0;
  Position position;

  friend bool operator==(const FloatAction&, const FloatAction&) = default;
};

using AgentAction = std::variant<RawAction, int, FloatAction>;

struct WrapperDecl {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
};

// Parses "discrete:6x9,rescale:80x120,last_action". Empty text is no wrappers.
std::vector<WrapperDecl> parse_wrapper_list(std::string_view text);
nlohmann::json wrappers_to_json(const std::vector<WrapperDecl>& decls);
std::vector<WrapperDecl> wrappers_from_json(const nlohmann::json& j);

// A base environment seen through an ordered list of wrappers. Known names:
// rescale {width, height}, discrete {cols, rows}, float, last_action.
class EnvStack {
 public:
  EnvStack(Environment& base, const std::vector<WrapperDecl>& decls);

  const ActionSpace& action_space() const { return space_; }
  bool has_last_action() const { return last_action_; }

  AugmentedTimeStep reset();
  AugmentedTimeStep step(const AgentAction& action);
  ExtrasMap request_extras();

  // The raw action the base environment receives for `action`.
  RawAction decode(const AgentAction& action) const;

 private:
  Environment* top_;
  std::vector<std::unique_ptr<Environment>> observation_wrappers_;
  ActionSpace space_;
  bool last_action_ = false;
  std::optional<int> last_index_;
};

}  // namespace touchboard

#endif  // TOUCHBOARD_WRAPPERS_HPP_
