#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hapticopter/gateway/protocol.hpp"
#include "hapticopter/gateway/session.hpp"

namespace hapticopter::gateway {

inline constexpr const char* kRecordFormat = "hapticopter-session";
inline constexpr int kRecordVersion = 1;

// Corrupted record; `index` is the zero-based line (0 is the header).
class RecordParseError : public std::runtime_error {
 public:
  RecordParseError(std::size_t index, const std::string& what)
      : std::runtime_error("record line " + std::to_string(index) + ": " + what), index(index) {}
  std::size_t index;
};

struct SessionRecord {
  Scenario scenario;
  SessionConfig config;
  std::uint64_t seed = 0;
  std::vector<RecordEntry> entries;  // nondecreasing ticks
  std::int64_t end_tick = 0;

  friend bool operator==(const SessionRecord& a, const SessionRecord& b) {
    return scenario_to_json(a.scenario) == scenario_to_json(b.scenario) &&
           a.seed == b.seed && a.entries == b.entries && a.end_tick == b.end_tick &&
           config_to_json(a.config) == config_to_json(b.config);
  }

  static json config_to_json(const SessionConfig& c) {
    const auto& l = c.loop;
    return {{"dt", l.sim.dt},
            {"drag", l.sim.drag},
            {"v_max", l.sim.v_max},
            {"radius", l.sim.radius},
            {"gains",
             {{"kp", l.gains.kp}, {"ki", l.gains.ki}, {"kd", l.gains.kd}, {"i_max", l.gains.i_max},
              {"a_max", l.gains.a_max}}},
            {"cue",
             {{"max_intensity", l.cue.max_intensity},
              {"threshold", l.cue.threshold},
              {"cutoff", l.cue.cutoff}}},
            {"max_range", l.max_range},
            {"mapping",
             {{"scale", c.mapping.scale},
              {"mode", c.mapping.mode == ClutchMode::Absolute ? "absolute" : "relative"},
              {"clearance", c.mapping.clearance},
              {"room", {{"min", vec_json(c.mapping.room.min)}, {"max", vec_json(c.mapping.room.max)}}}}},
            {"reorder_window", c.reorder_window}};
  }
};

inline SessionConfig config_from_json(const json& j) {
  SessionConfig c;
  auto& l = c.loop;
  l.sim.dt = j.at("dt").get<double>();
  l.sim.drag = j.at("drag").get<double>();
  l.sim.v_max = j.at("v_max").get<double>();
  l.sim.radius = j.at("radius").get<double>();
  const auto& g = j.at("gains");
  l.gains = {g.at("kp").get<double>(), g.at("ki").get<double>(), g.at("kd").get<double>(),
             g.at("i_max").get<double>(), g.at("a_max").get<double>()};
  const auto& cue = j.at("cue");
  l.cue = {cue.at("max_intensity").get<double>(), cue.at("threshold").get<double>(),
           cue.at("cutoff").get<double>()};
  l.max_range = j.at("max_range").get<double>();
  const auto& m = j.at("mapping");
  c.mapping.scale = m.at("scale").get<double>();
  const auto mode = m.at("mode").get<std::string>();
  if (mode != "absolute" && mode != "relative") throw ProtocolError("unknown mapping mode " + mode);
  c.mapping.mode = mode == "absolute" ? ClutchMode::Absolute : ClutchMode::Relative;
  c.mapping.clearance = m.at("clearance").get<double>();
  c.mapping.room.min = payload_vec(m.at("room"), "min");
  c.mapping.room.max = payload_vec(m.at("room"), "max");
  c.reorder_window = j.at("reorder_window").get<std::int64_t>();
  c.validate();
  return c;
}

inline SessionRecord record_session(const SessionCore& core) {
  SessionRecord r{core.initial_scenario(), core.config(), core.config().seed, core.applied(),
                  core.ticks()};
  return r;
}

inline void write_record(std::ostream& out, const SessionRecord& r) {
  json header{{"format", kRecordFormat},
              {"version", kRecordVersion},
              {"scenario", scenario_to_json(r.scenario)},
              {"seed", r.seed},
              {"config", SessionRecord::config_to_json(r.config)}};
  out << header.dump() << '\n';
  for (const auto& e : r.entries) out << json{{"tick", e.tick}, {"msg", to_json(e.msg)}}.dump() << '\n';
  out << json{{"end_tick", r.end_tick}}.dump() << '\n';
}

inline std::string record_to_string(const SessionRecord& r) {
  std::ostringstream s;
  write_record(s, r);
  return s.str();
}

inline SessionRecord read_record(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  if (lines.empty()) throw RecordParseError(0, "empty record");

  auto parse = [&](std::size_t i) {
    try {
      return json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw RecordParseError(i, e.what());
    }
  };

  SessionRecord r;
  {
    const json h = parse(0);
    try {
      if (h.at("format").get<std::string>() != kRecordFormat) throw RecordParseError(0, "not a session record");
      if (h.at("version").get<int>() != kRecordVersion) throw RecordParseError(0, "unsupported record version");
      r.scenario = scenario_from_json(h.at("scenario"));
      r.seed = h.at("seed").get<std::uint64_t>();
      r.config = config_from_json(h.at("config"));
    } catch (const RecordParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw RecordParseError(0, e.what());
    }
  }

  bool ended = false;
  std::int64_t last_tick = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (ended) throw RecordParseError(i, "content after the end marker");
    const json j = parse(i);
    try {
      if (j.is_object() && j.contains("end_tick")) {
        r.end_tick = j.at("end_tick").get<std::int64_t>();
        if (r.end_tick < last_tick) throw RecordParseError(i, "end_tick precedes the last entry");
        ended = true;
        continue;
      }
      RecordEntry e{j.at("tick").get<std::int64_t>(), message_from_json(j.at("msg"))};
      if (e.tick < last_tick) throw RecordParseError(i, "ticks must be nondecreasing");
      if (!is_inbound(e.msg.kind) || e.msg.kind == MessageKind::Hello)
        throw RecordParseError(i, "record holds only applied client inputs");
      last_tick = e.tick;
      r.entries.push_back(std::move(e));
    } catch (const RecordParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw RecordParseError(i, e.what());
    }
  }
  if (!ended) throw RecordParseError(lines.size(), "missing end marker");
  return r;
}

inline SessionRecord record_from_string(const std::string& s) {
  std::istringstream in(s);
  return read_record(in);
}

inline SessionRecord load_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open record " + path);
  return read_record(in);
}

// Offline, free-running replay through the same session core.
inline SessionCore replay_core(const SessionRecord& r) {
  SessionCore core(r.scenario, r.config);
  core.establish();
  std::size_t k = 0;
  for (std::int64_t tick = 0; tick < r.end_tick; ++tick) {
    while (k < r.entries.size() && r.entries[k].tick == tick) core.apply_recorded(r.entries[k++].msg);
    core.advance();
  }
  while (k < r.entries.size()) core.apply_recorded(r.entries[k++].msg);
  return core;
}

inline TrialLog replay_session(const SessionRecord& r) { return replay_core(r).log(); }

}  // namespace hapticopter::gateway
