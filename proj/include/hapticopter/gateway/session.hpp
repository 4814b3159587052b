#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hapticopter/gateway/protocol.hpp"
#include "hapticopter/loop.hpp"
#include "hapticopter/metrics.hpp"
#include "hapticopter/scenario.hpp"
#include "hapticopter/teleop.hpp"

namespace hapticopter::gateway {

struct SessionConfig {
  LoopConfig loop;
  MappingConfig mapping = simulation_mapping();
  std::uint64_t seed = 0;
  // Ticks an out-of-order gap may stay open before the missing seq is given up.
  std::int64_t reorder_window = 12;

  void validate() const {
    loop.validate();
    mapping.validate();
    if (reorder_window < 0) throw DomainError("reorder window must be non-negative");
  }
};

// An inbound message and the session tick at which it took effect.
struct RecordEntry {
  std::int64_t tick = 0;
  WireMessage msg;

  friend bool operator==(const RecordEntry&, const RecordEntry&) = default;
};

inline json event_payload(const TrialEvent& e) {
  return {{"kind", std::string(to_string(e.kind))},
          {"target", e.target},
          {"point", vec_json(e.point)},
          {"normal", vec_json(e.normal)},
          {"through_opening", e.through_opening}};
}

inline json cue_json(const HapticCue& c) {
  json a = json::array();
  for (double v : c.intensities) a.push_back(v);
  return a;
}

// Resolves a LoadScenario payload: {"scenario": "<builtin name>"} or
// {"scenario": {...inline scenario...}}.
inline Scenario scenario_from_payload(const json& payload) {
  payload_only(payload, {"scenario"});
  auto it = payload.find("scenario");
  if (it == payload.end()) throw ProtocolError("payload.scenario is required");
  try {
    if (it->is_string()) {
      auto task = task_from_string(it->get<std::string>());
      if (!task) throw ProtocolError("unknown built-in scenario '" + it->get<std::string>() + "'");
      return build_scenario(*task);
    }
    if (it->is_object()) return scenario_from_json(*it);
  } catch (const ScenarioError& e) {
    throw ProtocolError(std::string("invalid scenario: ") + e.what());
  } catch (const DomainError& e) {
    throw ProtocolError(std::string("invalid scenario: ") + e.what());
  }
  throw ProtocolError("payload.scenario must be a name or an object");
}

// Transport-free session: one simulation loop, one clock. Inbound messages
// are validated on arrival, held in a seq-ordered buffer, and applied at
// the start of the next tick in seq order. Everything applied is recorded
// with its tick, so replaying the record reproduces the session exactly.
class SessionCore {
 public:
  SessionCore(Scenario scenario, SessionConfig config)
      : config_(config), initial_(scenario), loop_(std::move(scenario), config.loop) {
    config_.validate();
    clutch_.mode = config_.mapping.mode;
  }

  bool established() const { return established_; }
  bool closed() const { return closed_; }
  const SimulationLoop& loop() const { return loop_; }
  const TrialLog& log() const { return loop_.log(); }
  const Scenario& initial_scenario() const { return initial_; }
  const SessionConfig& config() const { return config_; }
  const std::vector<RecordEntry>& applied() const { return applied_; }
  std::int64_t ticks() const { return ticks_; }
  const ClutchState& clutch() const { return clutch_; }
  bool stale() const {
    return clutch_.engaged &&
           (!hand_ || static_cast<double>(ticks_ - hand_tick_) * config_.loop.sim.dt >=
                          kStaleInputLimit - 1e-9);
  }

  MetricsSummary metrics() const {
    return summarize_trial(log(), loop_.scenario(), loop_.time());
  }

  std::vector<WireMessage> handle_text(std::string_view text) {
    if (closed_) return {};
    try {
      return handle_message(parse_message(text));
    } catch (const ProtocolError& e) {
      return {error(e.what(), std::nullopt)};
    }
  }

  // Replies to send right away (acks, errors). Effects on the simulation
  // happen in tick().
  std::vector<WireMessage> handle_message(const WireMessage& msg) {
    if (closed_) return {};
    if (msg.kind == MessageKind::Hello) return hello(msg);
    if (!established_) return {error("not established", msg.seq)};
    if (!is_inbound(msg.kind))
      return {error("message kind " + std::string(to_string(msg.kind)) + " is not accepted from clients",
                    msg.seq)};
    if (msg.seq < next_seq_ || pending_.count(msg.seq))
      return {error("stale or duplicate seq " + std::to_string(msg.seq), msg.seq)};
    try {
      validate_payload(msg);
    } catch (const ProtocolError& e) {
      pending_.emplace(msg.seq, std::nullopt);  // the seq is used up; nothing to apply
      return {error(e.what(), msg.seq)};
    }
    pending_.emplace(msg.seq, msg);
    return {};
  }

  // One simulation step: drain ready inputs in seq order, step, broadcast.
  std::vector<WireMessage> tick() {
    if (!established_ || closed_) return {};
    drain();
    return advance();
  }

  // Replay path: apply a recorded message as-is, then advance().
  void apply_recorded(const WireMessage& msg) { apply(msg); }

  std::vector<WireMessage> advance() {
    Vec3 goal = loop_.goal();
    if (clutch_.engaged && hand_) goal = map_hand_to_goal(*hand_, clutch_, config_.mapping, goal);
    if (goal_override_) {
      goal = *goal_override_;
      goal_override_.reset();
    }
    const auto events = loop_.step(goal, clutch_.engaged);
    ++ticks_;

    std::vector<WireMessage> out;
    const auto& s = loop_.state();
    out.push_back(outbound(MessageKind::StateUpdate,
                           {{"tick", loop_.tick()},
                            {"time", loop_.time()},
                            {"position", vec_json(s.drone.position)},
                            {"velocity", vec_json(s.drone.velocity)},
                            {"goal", vec_json(loop_.goal())},
                            {"clutch", clutch_.engaged},
                            {"stale", stale()},
                            {"completed", loop_.completed()},
                            {"cue", cue_json(loop_.cue())}}));
    out.push_back(outbound(MessageKind::CueUpdate, {{"intensities", cue_json(loop_.cue())},
                                                    {"max_intensity", loop_.cue().max_intensity}}));
    for (const auto& e : events) out.push_back(outbound(MessageKind::Event, event_payload(e)));
    return out;
  }

  // Marks the session established without a handshake (replay).
  void establish() { established_ = true; }

 private:
  std::vector<WireMessage> hello(const WireMessage& msg) {
    auto v = msg.payload.find("version");
    if (v == msg.payload.end() || !v->is_number_integer() || v->get<int>() != kProtocolVersion) {
      closed_ = true;
      auto e = error("version mismatch: server speaks version " + std::to_string(kProtocolVersion), msg.seq);
      e.payload["fatal"] = true;
      return {e};
    }
    if (!established_) {
      established_ = true;
      next_seq_ = msg.seq + 1;
    }
    const Aabb ws = config_.mapping.workspace();
    return {outbound(MessageKind::Hello,
                     {{"version", kProtocolVersion},
                      {"dt", config_.loop.sim.dt},
                      {"scale", config_.mapping.scale},
                      {"mode", config_.mapping.mode == ClutchMode::Absolute ? "absolute" : "relative"},
                      {"workspace", {{"min", vec_json(ws.min)}, {"max", vec_json(ws.max)}}},
                      {"scenario", scenario_to_json(loop_.scenario())}})};
  }

  static void validate_payload(const WireMessage& msg) {
    const json& p = msg.payload;
    switch (msg.kind) {
      case MessageKind::HandInput:
        payload_only(p, {"position"});
        payload_vec(p, "position");
        break;
      case MessageKind::ClutchInput:
        payload_only(p, {"engaged"});
        payload_bool(p, "engaged");
        break;
      case MessageKind::ResetGoal: payload_only(p, {}); break;
      case MessageKind::LoadScenario: scenario_from_payload(p); break;
      default: break;
    }
  }

  void drain() {
    while (!pending_.empty()) {
      auto it = pending_.begin();
      if (it->first != next_seq_) {
        if (gap_since_ < 0) gap_since_ = ticks_;
        if (ticks_ - gap_since_ < config_.reorder_window) break;
        next_seq_ = it->first;  // give up on the missing seq
      }
      gap_since_ = -1;
      if (it->second) apply(*it->second);
      next_seq_ = it->first + 1;
      pending_.erase(it);
    }
    if (pending_.empty()) gap_since_ = -1;
  }

  void apply(const WireMessage& msg) {
    applied_.push_back({ticks_, msg});
    switch (msg.kind) {
      case MessageKind::HandInput:
        hand_ = HandPose{payload_vec(msg.payload, "position"), msg.t};
        hand_tick_ = ticks_;
        break;
      case MessageKind::ClutchInput: {
        const bool engage = payload_bool(msg.payload, "engaged");
        if (engage && !hand_) break;  // nothing to anchor to yet
        clutch_ = clutch_transition(clutch_, engage, hand_.value_or(HandPose{}), loop_.goal());
        break;
      }
      case MessageKind::ResetGoal:
        clutch_ = clutch_transition(clutch_, false, hand_.value_or(HandPose{}), loop_.goal());
        goal_override_ = reset_goal(loop_.scenario());
        break;
      case MessageKind::LoadScenario:
        loop_ = SimulationLoop(scenario_from_payload(msg.payload), config_.loop);
        clutch_ = ClutchState{};
        clutch_.mode = config_.mapping.mode;
        hand_.reset();
        goal_override_.reset();
        break;
      default: break;
    }
  }

  WireMessage outbound(MessageKind kind, json payload) {
    return {kind, ++out_seq_, loop_.time(), std::move(payload)};
  }

  WireMessage error(const std::string& message, std::optional<std::int64_t> ref) {
    json p{{"message", message}, {"fatal", false}};
    p["ref_seq"] = ref ? json(*ref) : json(nullptr);
    return outbound(MessageKind::Error, std::move(p));
  }

  SessionConfig config_;
  Scenario initial_;
  SimulationLoop loop_;
  bool established_ = false;
  bool closed_ = false;
  std::int64_t ticks_ = 0;
  std::int64_t out_seq_ = 0;
  std::int64_t next_seq_ = 0;
  std::int64_t gap_since_ = -1;
  std::map<std::int64_t, std::optional<WireMessage>> pending_;
  std::vector<RecordEntry> applied_;
  ClutchState clutch_;
  std::optional<HandPose> hand_;
  std::int64_t hand_tick_ = 0;
  std::optional<Vec3> goal_override_;
};

// Per-client outbound buffer. Under backpressure (at or above high_water
// pending messages) older StateUpdate/CueUpdate entries are dropped when a
// newer one of the same kind arrives; every other message is kept and the
// relative order of what remains never changes.
class OutboundQueue {
 public:
  explicit OutboundQueue(std::size_t high_water = 64) : high_water_(high_water) {}

  void push(WireMessage m) {
    const bool coalescable = m.kind == MessageKind::StateUpdate || m.kind == MessageKind::CueUpdate;
    if (coalescable && queue_.size() >= high_water_) {
      const auto kind = m.kind;
      std::erase_if(queue_, [&](const WireMessage& q) { return q.kind == kind; });
      ++coalesced_;
    }
    queue_.push_back(std::move(m));
  }

  bool empty() const { return queue_.empty(); }
  std::size_t size() const { return queue_.size(); }
  std::size_t coalesced() const { return coalesced_; }
  const WireMessage& front() const { return queue_.front(); }
  WireMessage pop() {
    WireMessage m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

 private:
  std::deque<WireMessage> queue_;
  std::size_t high_water_;
  std::size_t coalesced_ = 0;
};

}  // namespace hapticopter::gateway
