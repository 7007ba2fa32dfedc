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

#ifndef TOUCHBOARD_RECORDING_HPP_
#define TOUCHBOARD_RECORDING_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "touchboard/agents.hpp"
#include "touchboard/engine.hpp"
#include "touchboard/wrappers.hpp"

namespace touchboard {

// One reset or step as the engine saw it. Times are engine clock readings:
// when the actions were taken in and when the observation was fetched.
struct RecordedStep {
  std::uint64_t index = 0;
  StepType step_type = StepType::kMid;
  Micros call_time = 0;
  Micros fetch_time = 0;
  std::vector<RawAction> actions;  // empty for FIRST
  double reward = 0.0;
  Micros timedelta = 0;
  std::uint32_t frame_id = 0;
};

struct RecordingHeader {
  TaskSpec task;
  // The engine's configuration, with `seed` rewritten to the seed of the
  // first recorded episode.
  EngineConfig engine;
  std::vector<WrapperDecl> wrappers;
  int protocol_version = 1;
  std::string policy;
  int frame_width = 0;
  int frame_height = 0;
};

// File layout: "TBRC", version byte, then three u32-length-prefixed sections
// (JSON header, JSON record table, frame index) and the frame blob. Frames
// are zlib-compressed RGB; identical consecutive frames share an id.
class EpisodeRecording {
 public:
  static constexpr std::uint8_t kFormatVersion = 1;

  RecordingHeader header;
  std::vector<RecordedStep> steps;

  std::uint32_t add_frame(const FrameBuffer& frame);
  FrameBuffer frame(std::uint32_t id) const;  // throws kIndexOutOfRange
  std::size_t frame_count() const { return frames_.size(); }

  void save(const std::filesystem::path& path) const;
  // Throws kIoError or kParseError on an unreadable or inconsistent file.
  static EpisodeRecording load(const std::filesystem::path& path);

 private:
  std::vector<std::vector<std::uint8_t>> frames_;  // compressed
  std::vector<std::uint8_t> last_raw_;
};

// Undiscounted return of every episode in the recording; each FIRST starts
// a new one.
std::vector<double> episode_returns(const EpisodeRecording& recording);

// Mean episode return over a set of recordings. Throws kInvalidArgument when
// they hold no episodes.
double human_baseline(const std::vector<EpisodeRecording>& recordings);

// Captures the resets and steps made on one engine. Nothing is kept until the
// first reset, so every recording starts at an episode boundary.
class Recorder {
 public:
  Recorder(const Engine& engine, std::string policy, std::vector<WrapperDecl> wrappers = {});

  void on_reset(const TimeStep& ts);
  void on_step(std::span<const RawAction> actions, const TimeStep& ts);
  bool started() const { return started_; }
  std::size_t size() const { return recording_.steps.size(); }

  EpisodeRecording take() { return std::move(recording_); }

 private:
  void begin();
  void add(StepType, std::span<const RawAction> actions, const TimeStep& ts);

  const Engine& engine_;
  EpisodeRecording recording_;
  bool started_ = false;
};

// An engine seen through a recorder.
class RecordingEnvironment final : public Environment {
 public:
  RecordingEnvironment(Engine& engine, Recorder& recorder) : engine_(engine), recorder_(recorder) {}

  TimeStep reset() override;
  using Environment::step;
  TimeStep step(std::span<const RawAction> actions) override;
  ExtrasMap request_extras() override { return engine_.request_extras(); }

 private:
  Engine& engine_;
  Recorder& recorder_;
};

// Runs a policy for `episodes` episodes and records every step.
EpisodeRecording record_episodes(const PolicyFactory& policy, const TaskSpec& task, int episodes,
                                 const EvalOptions& options);

struct ReplayResult {
  bool match = true;
  std::uint64_t steps = 0;            // records replayed
  std::optional<std::uint64_t> divergent_step;
  std::string reason;
};

// Re-drives the recorded actions at the recorded times on a VIRTUAL clock and
// compares step types, rewards, timedeltas and frames.
ReplayResult replay(const EpisodeRecording& recording);

}  // namespace touchboard

#endif  // TOUCHBOARD_RECORDING_HPP_
