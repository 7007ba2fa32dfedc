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

#include "touchboard/recording.hpp"

#include <zlib.h>

#include <fstream>
#include <iterator>
#include <numeric>

#include "touchboard/protocol.hpp"

namespace touchboard {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'T', 'B', 'R', 'C'};

void put_u32(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_section(std::vector<std::uint8_t>& out, const std::string& text) {
  put_u32(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
}

// Bounds-checked reader over the loaded file.
class Cursor {
 public:
  explicit Cursor(const std::vector<std::uint8_t>& data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    const std::uint8_t* p = data_.data() + pos_;
    pos_ += 4;
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
  }
  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    std::span<const std::uint8_t> out(data_.data() + pos_, n);
    pos_ += n;
    return out;
  }
  json section() {
    const auto raw = bytes(u32());
    try {
      return json::parse(raw.begin(), raw.end());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, std::string("recording: ") + e.what());
    }
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(ErrorCode::kParseError, "recording is truncated");
  }

  const std::vector<std::uint8_t>& data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> compress(const std::vector<std::uint8_t>& raw) {
  uLongf size = compressBound(raw.size());
  std::vector<std::uint8_t> out(size);
  if (compress2(out.data(), &size, raw.data(), raw.size(), Z_BEST_SPEED) != Z_OK) {
    throw Error(ErrorCode::kIoError, "frame compression failed");
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> decompress(const std::vector<std::uint8_t>& packed, std::size_t raw_size) {
  std::vector<std::uint8_t> out(raw_size);
  uLongf size = raw_size;
  if (uncompress(out.data(), &size, packed.data(), packed.size()) != Z_OK || size != raw_size) {
    throw Error(ErrorCode::kParseError, "corrupt frame data");
  }
  return out;
}

json header_to_json(const RecordingHeader& h) {
  return {{"task", task_to_json(h.task)},
          {"task_id", h.task.id},
          {"seed", h.engine.seed},
          {"clock", std::string(clock_mode_name(h.engine.clock))},
          {"engine", engine_config_to_json(h.engine)},
          {"wrappers", wrappers_to_json(h.wrappers)},
          {"gestures", h.task.gestures},
          {"protocol_version", h.protocol_version},
          {"policy", h.policy},
          {"frame_width", h.frame_width},
          {"frame_height", h.frame_height},
          {"frame_encoding", "zlib"}};
}

RecordingHeader header_from_json(const json& j) {
  RecordingHeader h;
  h.task = load_task(j.at("task").dump());
  h.engine = engine_config_from_json(j.at("engine"));
  h.wrappers = wrappers_from_json(j.at("wrappers"));
  h.protocol_version = j.at("protocol_version").get<int>();
  h.policy = j.at("policy").get<std::string>();
  h.frame_width = j.at("frame_width").get<int>();
  h.frame_height = j.at("frame_height").get<int>();
  if (j.value("frame_encoding", "") != "zlib") throw Error(ErrorCode::kParseError, "unknown frame encoding");
  return h;
}

json step_to_json(const RecordedStep& s) {
  return {{"i", s.index},
          {"type", std::string(step_type_name(s.step_type))},
          {"call_us", s.call_time},
          {"fetch_us", s.fetch_time},
          {"actions", s.actions},
          {"reward", s.reward},
          {"timedelta_us", s.timedelta},
          {"frame", s.frame_id}};
}

RecordedStep step_from_json(const json& j) {
  RecordedStep s;
  s.index = j.at("i").get<std::uint64_t>();
  const auto type = parse_step_type(j.at("type").get<std::string>());
  if (!type) throw Error(ErrorCode::kParseError, "unknown step type in recording");
  s.step_type = *type;
  s.call_time = j.at("call_us").get<Micros>();
  s.fetch_time = j.at("fetch_us").get<Micros>();
  s.actions = j.at("actions").get<std::vector<RawAction>>();
  s.reward = j.at("reward").get<double>();
  s.timedelta = j.at("timedelta_us").get<Micros>();
  s.frame_id = j.at("frame").get<std::uint32_t>();
  return s;
}

}  // namespace

std::uint32_t EpisodeRecording::add_frame(const FrameBuffer& frame) {
  if (header.frame_width == 0) {
    header.frame_width = frame.width();
    header.frame_height = frame.height();
  }
  if (frame.width() != header.frame_width || frame.height() != header.frame_height) {
    throw Error(ErrorCode::kShapeMismatch, "frame size changed within a recording");
  }
  if (!frames_.empty() && frame.data() == last_raw_) return static_cast<std::uint32_t>(frames_.size() - 1);
  last_raw_ = frame.data();
  frames_.push_back(compress(last_raw_));
  return static_cast<std::uint32_t>(frames_.size() - 1);
}

FrameBuffer EpisodeRecording::frame(std::uint32_t id) const {
  if (id >= frames_.size()) throw Error(ErrorCode::kIndexOutOfRange, "no frame " + std::to_string(id));
  const std::size_t raw = static_cast<std::size_t>(header.frame_width) * header.frame_height * 3;
  return FrameBuffer(header.frame_width, header.frame_height, decompress(frames_[id], raw));
}

void EpisodeRecording::save(const std::filesystem::path& path) const {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kFormatVersion);
  put_section(out, header_to_json(header).dump());
  json table = json::array();
  for (const RecordedStep& s : steps) table.push_back(step_to_json(s));
  put_section(out, table.dump());
  put_u32(out, frames_.size());
  for (const auto& f : frames_) put_u32(out, f.size());
  for (const auto& f : frames_) out.insert(out.end(), f.begin(), f.end());

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

EpisodeRecording EpisodeRecording::load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  Cursor in(data);
  const auto magic = in.bytes(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) {
    throw Error(ErrorCode::kParseError, path.string() + " is not a recording");
  }
  if (in.u8() != kFormatVersion) throw Error(ErrorCode::kParseError, "unsupported recording version");

  EpisodeRecording rec;
  try {
    rec.header = header_from_json(in.section());
    for (const json& j : in.section()) rec.steps.push_back(step_from_json(j));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("recording: ") + e.what());
  }
  std::vector<std::uint32_t> sizes(in.u32());
  for (auto& s : sizes) s = in.u32();
  for (std::uint32_t s : sizes) {
    const auto bytes = in.bytes(s);
    rec.frames_.emplace_back(bytes.begin(), bytes.end());
  }
  if (!in.done()) throw Error(ErrorCode::kParseError, "trailing bytes after the frame blob");
  for (std::size_t i = 0; i < rec.steps.size(); ++i) {
    if (rec.steps[i].index != i) throw Error(ErrorCode::kParseError, "records are not contiguous");
    if (rec.steps[i].frame_id >= rec.frames_.size()) {
      throw Error(ErrorCode::kParseError, "record " + std::to_string(i) + " has no frame");
    }
  }
  return rec;
}

std::vector<double> episode_returns(const EpisodeRecording& recording) {
  std::vector<double> out;
  for (const RecordedStep& s : recording.steps) {
    if (s.step_type == StepType::kFirst) {
      out.push_back(0.0);
    } else if (!out.empty()) {
      out.back() += s.reward;
    }
  }
  return out;
}

double human_baseline(const std::vector<EpisodeRecording>& recordings) {
  std::vector<double> returns;
  for (const EpisodeRecording& r : recordings) {
    const auto more = episode_returns(r);
    returns.insert(returns.end(), more.begin(), more.end());
  }
  if (returns.empty()) throw Error(ErrorCode::kInvalidArgument, "recordings contain no episodes");
  return std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
}

Recorder::Recorder(const Engine& engine, std::string policy, std::vector<WrapperDecl> wrappers)
    : engine_(engine) {
  recording_.header.policy = std::move(policy);
  recording_.header.wrappers = std::move(wrappers);
  recording_.header.protocol_version = net::kProtocolVersion;
}

void Recorder::begin() {
  const auto task = engine_.task();
  if (!task) throw Error(ErrorCode::kTaskLoadError, "recording needs a loaded task");
  RecordingHeader& h = recording_.header;
  h.task = *task;
  h.engine = engine_.config();
  // The reset that just happened used seed + (episode_index - 1).
  h.engine.seed = engine_.config().seed + engine_.status().episode_index - 1;
  started_ = true;
}

void Recorder::add(StepType type, std::span<const RawAction> actions, const TimeStep& ts) {
  RecordedStep s;
  s.index = recording_.steps.size();
  s.step_type = type;
  s.call_time = engine_.last_call_time();
  s.fetch_time = engine_.last_fetch_time();
  if (type != StepType::kFirst) s.actions.assign(actions.begin(), actions.end());
  s.reward = ts.reward;
  s.timedelta = ts.observation.timedelta;
  s.frame_id = recording_.add_frame(ts.observation.pixels);
  recording_.steps.push_back(std::move(s));
}

void Recorder::on_reset(const TimeStep& ts) {
  if (!started_) begin();
  add(StepType::kFirst, {}, ts);
}

void Recorder::on_step(std::span<const RawAction> actions, const TimeStep& ts) {
  if (!started_) {
    // A step past LAST resets; that is as good a starting point as reset().
    if (!ts.first()) return;
    begin();
  }
  add(ts.step_type, actions, ts);
}

TimeStep RecordingEnvironment::reset() {
  TimeStep ts = engine_.reset();
  recorder_.on_reset(ts);
  return ts;
}

TimeStep RecordingEnvironment::step(std::span<const RawAction> actions) {
  TimeStep ts = engine_.step(actions);
  recorder_.on_step(actions, ts);
  return ts;
}

EpisodeRecording record_episodes(const PolicyFactory& make_policy, const TaskSpec& task, int episodes,
                                 const EvalOptions& options) {
  if (episodes < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one episode");
  Engine engine(options.engine);
  engine.load_task(task);
  std::unique_ptr<Policy> policy;
  Recorder recorder(engine, "", options.wrappers);
  RecordingEnvironment recorded(engine, recorder);
  EnvStack env(recorded, options.wrappers);
  policy = make_policy(env.action_space(), options.engine.seed);
  for (int ep = 0; ep < episodes; ++ep) {
    AugmentedTimeStep ts = env.reset();
    for (std::uint64_t n = 0; !ts.timestep.last() && n < options.max_steps_per_episode; ++n) {
      const AgentAction action = policy->act(ts, env);
      if (options.deliberation > 0) engine.advance(options.deliberation);
      ts = env.step(action);
    }
  }
  EpisodeRecording rec = recorder.take();
  rec.header.policy = policy->id();
  return rec;
}

ReplayResult replay(const EpisodeRecording& recording) {
  EngineConfig cfg = recording.header.engine;
  cfg.clock = ClockMode::kVirtual;
  Engine engine(cfg);
  engine.load_task(recording.header.task);

  ReplayResult result;
  auto diverge = [&](const RecordedStep& s, std::string why) {
    result.match = false;
    result.divergent_step = s.index;
    result.reason = std::move(why);
    return result;
  };
  for (const RecordedStep& s : recording.steps) {
    if (s.call_time < engine.clock().now() || s.fetch_time < s.call_time) {
      return diverge(s, "recorded times run backwards");
    }
    TimeStep ts;
    if (s.step_type == StepType::kFirst) {
      engine.advance_to(s.fetch_time);
      ts = engine.reset();
    } else {
      engine.advance_to(s.call_time);
      ts = engine.step_until(s.actions, s.fetch_time);
    }
    ++result.steps;
    if (ts.step_type != s.step_type) {
      return diverge(s, "step type " + std::string(step_type_name(ts.step_type)) + " != recorded " +
                            std::string(step_type_name(s.step_type)));
    }
    if (ts.reward != s.reward) {
      return diverge(s, "reward " + std::to_string(ts.reward) + " != recorded " + std::to_string(s.reward));
    }
    if (ts.observation.timedelta != s.timedelta) return diverge(s, "timedelta differs");
    if (ts.observation.pixels != recording.frame(s.frame_id)) return diverge(s, "frame differs");
  }
  return result;
}

}  // namespace touchboard
