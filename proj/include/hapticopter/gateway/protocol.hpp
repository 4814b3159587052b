#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hapticopter/vec3.hpp"

namespace hapticopter::gateway {

using nlohmann::json;

inline constexpr int kProtocolVersion = 1;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MessageKind {
  Hello,
  LoadScenario,
  HandInput,
  ClutchInput,
  StateUpdate,
  CueUpdate,
  Event,
  ResetGoal,
  Error
};

inline constexpr std::array<MessageKind, 9> kMessageKinds{
    MessageKind::Hello,       MessageKind::LoadScenario, MessageKind::HandInput,
    MessageKind::ClutchInput, MessageKind::StateUpdate,  MessageKind::CueUpdate,
    MessageKind::Event,       MessageKind::ResetGoal,    MessageKind::Error};

constexpr std::string_view to_string(MessageKind k) {
  switch (k) {
    case MessageKind::Hello: return "Hello";
    case MessageKind::LoadScenario: return "LoadScenario";
    case MessageKind::HandInput: return "HandInput";
    case MessageKind::ClutchInput: return "ClutchInput";
    case MessageKind::StateUpdate: return "StateUpdate";
    case MessageKind::CueUpdate: return "CueUpdate";
    case MessageKind::Event: return "Event";
    case MessageKind::ResetGoal: return "ResetGoal";
    case MessageKind::Error: return "Error";
  }
  return "?";
}

inline std::optional<MessageKind> message_kind_from_string(std::string_view s) {
  for (auto k : kMessageKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

// Kinds a client may send.
constexpr bool is_inbound(MessageKind k) {
  return k == MessageKind::Hello || k == MessageKind::LoadScenario || k == MessageKind::HandInput ||
         k == MessageKind::ClutchInput || k == MessageKind::ResetGoal;
}

// Envelope {kind, seq, t, payload}.
struct WireMessage {
  MessageKind kind = MessageKind::Hello;
  std::int64_t seq = 0;
  double t = 0.0;
  json payload = json::object();

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

inline json to_json(const WireMessage& m) {
  return {{"kind", std::string(to_string(m.kind))}, {"seq", m.seq}, {"t", m.t}, {"payload", m.payload}};
}

inline WireMessage message_from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("envelope must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "kind" && key != "seq" && key != "t" && key != "payload")
      throw ProtocolError("unknown envelope field '" + key + "'");
  WireMessage m;
  auto kind = j.find("kind");
  if (kind == j.end() || !kind->is_string()) throw ProtocolError("envelope.kind must be a string");
  auto k = message_kind_from_string(kind->get<std::string>());
  if (!k) throw ProtocolError("unknown message kind '" + kind->get<std::string>() + "'");
  m.kind = *k;
  auto seq = j.find("seq");
  if (seq == j.end() || !seq->is_number_integer()) throw ProtocolError("envelope.seq must be an integer");
  m.seq = seq->get<std::int64_t>();
  auto t = j.find("t");
  if (t == j.end() || !t->is_number() || !std::isfinite(t->get<double>()))
    throw ProtocolError("envelope.t must be a finite number");
  m.t = t->get<double>();
  auto payload = j.find("payload");
  if (payload != j.end()) {
    if (!payload->is_object()) throw ProtocolError("envelope.payload must be an object");
    m.payload = *payload;
  }
  return m;
}

inline WireMessage parse_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
  return message_from_json(j);
}

inline std::string serialize(const WireMessage& m) { return to_json(m).dump(); }

// ---- payload helpers --------------------------------------------------------

inline json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline Vec3 payload_vec(const json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end() || !it->is_array() || it->size() != 3)
    throw ProtocolError(std::string("payload.") + key + " must be an array of 3 numbers");
  Vec3 v;
  for (int a = 0; a < 3; ++a) {
    const auto& e = (*it)[static_cast<std::size_t>(a)];
    if (!e.is_number() || !std::isfinite(e.get<double>()))
      throw ProtocolError(std::string("payload.") + key + " must hold finite numbers");
    v[a] = e.get<double>();
  }
  return v;
}

inline bool payload_bool(const json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end() || !it->is_boolean())
    throw ProtocolError(std::string("payload.") + key + " must be a boolean");
  return it->get<bool>();
}

inline void payload_only(const json& payload, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : payload.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ProtocolError("unknown payload field '" + key + "'");
  }
}

}  // namespace hapticopter::gateway
