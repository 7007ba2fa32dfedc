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

#ifndef TOUCHBOARD_ENVIRONMENT_HPP_
#define TOUCHBOARD_ENVIRONMENT_HPP_

#include <span>

#include "touchboard/core.hpp"

namespace touchboard {

// reset/step interface over raw actions. Implemented by the in-process engine,
// observation wrappers and the remote client.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual TimeStep reset() = 0;
  virtual TimeStep step(std::span<const RawAction> actions) = 0;
  // Extras accumulated since the previous request; never part of a TimeStep.
  virtual ExtrasMap request_extras() = 0;

  TimeStep step(const RawAction& action) { return step(std::span<const RawAction>(&action, 1)); }
};

}  // namespace touchboard

#endif  // TOUCHBOARD_ENVIRONMENT_HPP_
