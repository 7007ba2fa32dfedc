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

#include "touchboard/wrappers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace touchboard {
namespace {

struct Tap {
  int src;
  std::int64_t weight;
};

// For each output index, the source indices and integer weights covering it.
// Weights of one output sum to `norm`.
std::vector<std::vector<Tap>> axis_taps(int src, int dst, std::int64_t& norm) {
  std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(dst));
  if (dst > src) {
    norm = 1;
    for (int o = 0; o < dst; ++o) {
      const int s = static_cast<int>((static_cast<std::int64_t>(2 * o + 1) * src) / (2 * dst));
      taps[o].push_back({std::min(s, src - 1), 1});
    }
    return taps;
  }
  // Source pixel s spans [s*dst, (s+1)*dst), output o spans [o*src, (o+1)*src).
  norm = src;
  for (int o = 0; o < dst; ++o) {
    const std::int64_t lo = static_cast<std::int64_t>(o) * src;
    const std::int64_t hi = lo + src;
    for (int s = static_cast<int>(lo / dst); s < src && static_cast<std::int64_t>(s) * dst < hi; ++s) {
      const std::int64_t overlap =
          std::min<std::int64_t>(hi, static_cast<std::int64_t>(s + 1) * dst) -
          std::max<std::int64_t>(lo, static_cast<std::int64_t>(s) * dst);
      if (overlap > 0) taps[o].push_back({s, overlap});
    }
  }
  return taps;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "bad " + what + " '" + s + "'");
  }
}

// "AxB" -> (A, B)
std::pair<int, int> parse_dims(const std::string& s, const std::string& what) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "expected AxB for " + what);
  return {parse_int(s.substr(0, x), what), parse_int(s.substr(x + 1), what)};
}

}  // namespace

void GridSpec::validate() const {
  if (cols < 1 || rows < 1) throw Error(ErrorCode::kInvalidArgument, "grid needs cols, rows >= 1");
}

RawAction discrete_to_raw(int index, const GridSpec& grid) {
  grid.validate();
  if (index < 0 || index >= grid.actions()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "index " + std::to_string(index) + " outside [0, " + std::to_string(grid.actions()) + ")");
  }
  const int cells = grid.cells();
  const int cell = index % cells;
  const int row = cell / grid.cols;
  const int col = cell % grid.cols;
  return {index < cells ? ActionType::kTouch : ActionType::kLift,
          {(col + 0.5) / grid.cols, (row + 0.5) / grid.rows}};
}

int raw_to_discrete(const RawAction& action, const GridSpec& grid) {
  grid.validate();
  validate_action(action);
  if (action.type == ActionType::kRepeat) {
    throw Error(ErrorCode::kInvalidAction, "REPEAT has no discrete index");
  }
  const int col = std::min(grid.cols - 1, static_cast<int>(std::floor(action.position.x * grid.cols)));
  const int row = std::min(grid.rows - 1, static_cast<int>(std::floor(action.position.y * grid.rows)));
  const int cell = row * grid.cols + col;
  return action.type == ActionType::kTouch ? cell : grid.cells() + cell;
}

RawAction float_to_raw(double type_value, Position position) {
  if (!(type_value >= 0.0 && type_value <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "action type value must lie in [0, 1]");
  }
  return {type_value >= 0.5 ? ActionType::kLift : ActionType::kTouch, position};
}

FrameBuffer rescale(const FrameBuffer& pixels, int target_width, int target_height) {
  if (target_width < 1 || target_height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "rescale targets must be at least 1");
  }
  if (pixels.width() == target_width && pixels.height() == target_height) return pixels;
  std::int64_t norm_x = 1;
  std::int64_t norm_y = 1;
  const auto taps_x = axis_taps(pixels.width(), target_width, norm_x);
  const auto taps_y = axis_taps(pixels.height(), target_height, norm_y);
  const std::int64_t norm = norm_x * norm_y;

  FrameBuffer out(target_width, target_height);
  const auto& src = pixels.data();
  auto& dst = out.data();
  for (int oy = 0; oy < target_height; ++oy) {
    for (int ox = 0; ox < target_width; ++ox) {
      std::int64_t acc[3] = {0, 0, 0};
      for (const Tap& ty : taps_y[oy]) {
        for (const Tap& tx : taps_x[ox]) {
          const std::int64_t w = ty.weight * tx.weight;
          const std::size_t i = (static_cast<std::size_t>(ty.src) * pixels.width() + tx.src) * 3;
          acc[0] += w * src[i];
          acc[1] += w * src[i + 1];
          acc[2] += w * src[i + 2];
        }
      }
      const std::size_t o = (static_cast<std::size_t>(oy) * target_width + ox) * 3;
      for (int c = 0; c < 3; ++c) {
        // Round half up in exact integer arithmetic.
        dst[o + c] = static_cast<std::uint8_t>((2 * acc[c] + norm) / (2 * norm));
      }
    }
  }
  return out;
}

std::vector<float> last_action_encoding(std::optional<int> last, const GridSpec& grid) {
  std::vector<float> v(static_cast<std::size_t>(grid.cells()) + 1, 0.0f);
  if (!last) return v;
  if (*last < 0 || *last >= grid.actions()) {
    throw Error(ErrorCode::kIndexOutOfRange, "last action index out of range");
  }
  v[static_cast<std::size_t>(*last % grid.cells())] = 1.0f;
  v.back() = *last < grid.cells() ? 1.0f : 0.0f;
  return v;
}

AugmentedObservation last_action_overlay(const Observation& obs, std::optional<int> last,
                                         const GridSpec& grid) {
  return {obs, last_action_encoding(last, grid)};
}

ImageRescaleWrapper::ImageRescaleWrapper(Environment& inner, int width, int height)
    : inner_(inner), width_(width), height_(height) {
  if (width < 1 || height < 1) throw Error(ErrorCode::kInvalidArgument, "rescale targets must be at least 1");
}

TimeStep ImageRescaleWrapper::resize(TimeStep ts) const {
  ts.observation.pixels = rescale(ts.observation.pixels, width_, height_);
  return ts;
}

TimeStep ImageRescaleWrapper::reset() { return resize(inner_.reset()); }

TimeStep ImageRescaleWrapper::step(std::span<const RawAction> actions) {
  return resize(inner_.step(actions));
}

DiscreteActionWrapper::DiscreteActionWrapper(Environment& inner, GridSpec grid)
    : inner_(inner), grid_(grid) {
  grid_.validate();
}

TimeStep DiscreteActionWrapper::step(int index) { return inner_.step(discrete_to_raw(index, grid_)); }

TimeStep FloatActionWrapper::step(double type_value, Position position) {
  return inner_.step(float_to_raw(type_value, position));
}

AugmentedTimeStep LastActionWrapper::reset() {
  last_.reset();
  TimeStep ts = inner_.reset();
  return {std::move(ts), last_action_encoding(last_, inner_.grid())};
}

AugmentedTimeStep LastActionWrapper::step(int index) {
  TimeStep ts = inner_.step(index);
  last_ = index;
  if (ts.first()) last_.reset();
  return {std::move(ts), last_action_encoding(last_, inner_.grid())};
}

std::vector<WrapperDecl> parse_wrapper_list(std::string_view text) {
  std::vector<WrapperDecl> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    WrapperDecl decl;
    decl.name = item.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : item.substr(colon + 1);
    if (decl.name == "discrete") {
      GridSpec grid;
      if (!arg.empty()) std::tie(grid.cols, grid.rows) = parse_dims(arg, "grid");
      decl.params = {{"cols", grid.cols}, {"rows", grid.rows}};
    } else if (decl.name == "rescale") {
      auto [w, h] = arg.empty() ? std::pair{80, 120} : parse_dims(arg, "rescale size");
      decl.params = {{"width", w}, {"height", h}};
    } else if (decl.name != "float" && decl.name != "last_action") {
      throw Error(ErrorCode::kInvalidArgument, "unknown wrapper '" + decl.name + "'");
    }
    out.push_back(std::move(decl));
  }
  return out;
}

nlohmann::json wrappers_to_json(const std::vector<WrapperDecl>& decls) {
  nlohmann::json j = nlohmann::json::array();
  for (const WrapperDecl& d : decls) j.push_back({{"name", d.name}, {"params", d.params}});
  return j;
}

std::vector<WrapperDecl> wrappers_from_json(const nlohmann::json& j) {
  std::vector<WrapperDecl> out;
  for (const auto& item : j) {
    out.push_back({item.at("name").get<std::string>(), item.value("params", nlohmann::json::object())});
  }
  return out;
}

EnvStack::EnvStack(Environment& base, const std::vector<WrapperDecl>& decls) : top_(&base) {
  bool action_set = false;
  for (const WrapperDecl& d : decls) {
    if (d.name == "rescale") {
      observation_wrappers_.push_back(std::make_unique<ImageRescaleWrapper>(
          *top_, d.params.value("width", 80), d.params.value("height", 120)));
      top_ = observation_wrappers_.back().get();
    } else if (d.name == "discrete" || d.name == "float") {
      if (action_set) throw Error(ErrorCode::kInvalidArgument, "only one action wrapper is allowed");
      action_set = true;
      if (d.name == "discrete") {
        space_.kind = ActionSpaceKind::kDiscrete;
        space_.grid = {d.params.value("cols", 6), d.params.value("rows", 9)};
        space_.grid.validate();
      } else {
        space_.kind = ActionSpaceKind::kFloat;
      }
    } else if (d.name == "last_action") {
      last_action_ = true;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown wrapper '" + d.name + "'");
    }
  }
  if (last_action_ && space_.kind != ActionSpaceKind::kDiscrete) {
    throw Error(ErrorCode::kInvalidArgument, "last_action needs the discrete wrapper");
  }
}

RawAction EnvStack::decode(const AgentAction& action) const {
  switch (space_.kind) {
    case ActionSpaceKind::kRaw:
      if (const auto* raw = std::get_if<RawAction>(&action)) return *raw;
      break;
    case ActionSpaceKind::kDiscrete:
      if (const auto* index = std::get_if<int>(&action)) return discrete_to_raw(*index, space_.grid);
      break;
    case ActionSpaceKind::kFloat:
      if (const auto* f = std::get_if<FloatAction>(&action)) return float_to_raw(f->type_value, f->position);
      break;
  }
  throw Error(ErrorCode::kInvalidAction, "action does not belong to this action space");
}

AugmentedTimeStep EnvStack::reset() {
  last_index_.reset();
  AugmentedTimeStep out{top_->reset(), {}};
  if (last_action_) out.last_action = last_action_encoding(last_index_, space_.grid);
  return out;
}

AugmentedTimeStep EnvStack::step(const AgentAction& action) {
  const RawAction raw = decode(action);
  AugmentedTimeStep out{top_->step(raw), {}};
  if (last_action_) {
    last_index_ = std::get<int>(action);
    if (out.timestep.first()) last_index_.reset();
    out.last_action = last_action_encoding(last_index_, space_.grid);
  }
  return out;
}

ExtrasMap EnvStack::request_extras() { return top_->request_extras(); }

}  // namespace touchboard
