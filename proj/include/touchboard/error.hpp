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

#ifndef TOUCHBOARD_ERROR_HPP_
#define TOUCHBOARD_ERROR_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace touchboard {

// Every failure the library reports carries one of these codes. The code name
// is what travels over the wire in ERROR messages.
enum class ErrorCode {
  kOutOfBounds,
  kInvalidAction,
  kNotStarted,
  kTaskLoadError,
  kParseError,
  kUnknownApp,
  kUnknownTask,
  kSchemaError,
  kShapeMismatch,
  kIllegalStream,
  kUnrealizable,
  kIndexOutOfRange,
  kOutOfRange,
  kFrameTooLarge,
  kUnknownTag,
  kMalformedBody,
  kSessionBusy,
  kVersionMismatch,
  kMissingExtras,
  kDegenerateBaseline,
  kInvalidArgument,
  kIoError,
  kHandshakeRequired,
  kReplayMismatch,
};

std::string_view error_code_name(ErrorCode code);
// Inverse of error_code_name; nullopt for names it never produces.
std::optional<ErrorCode> parse_error_code(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace touchboard

#endif  // TOUCHBOARD_ERROR_HPP_
