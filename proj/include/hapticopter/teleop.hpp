#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hapticopter/scenario.hpp"
#include "hapticopter/vec3.hpp"
#include "hapticopter/world.hpp"

namespace hapticopter {

struct HandPose {
  Vec3 position;  // operator frame, metres
  double timestamp = 0.0;

  friend bool operator==(const HandPose&, const HandPose&) = default;
};

enum class ClutchMode { Absolute, Relative };

struct ClutchState {
  bool engaged = false;
  Vec3 anchor_hand;
  Vec3 anchor_goal;
  ClutchMode mode = ClutchMode::Absolute;

  friend bool operator==(const ClutchState&, const ClutchState&) = default;
};

struct MappingConfig {
  double scale = 8.0;
  ClutchMode mode = ClutchMode::Absolute;
  Aabb room{{-5.0, -5.0, 0.0}, {5.0, 5.0, 4.0}};
  double clearance = 0.2;  // goal keeps this far from the room walls (2x drone radius)

  // Operator reach box: the room shrunk by `scale` about the origin, so the
  // workspace centre maps onto the room centre.
  Aabb workspace() const { return {room.min * (1.0 / scale), room.max * (1.0 / scale)}; }

  void validate() const {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("scale must be positive");
    if (!room.valid()) throw DomainError("room must have positive extent");
  }
};

// Simulated-room preset (arm reach matched to the room) and the more
// conservative preset used on the real quadrotor.
inline MappingConfig simulation_mapping() { return MappingConfig{}; }
inline MappingConfig hardware_mapping() {
  MappingConfig c;
  c.scale = 6.0;
  return c;
}

// Goal for an engaged clutch before it is clamped into the room.
inline Vec3 scaled_goal(const HandPose& hand, const ClutchState& clutch,
                        const MappingConfig& config) {
  if (clutch.mode == ClutchMode::Relative)
    return clutch.anchor_goal + (hand.position - clutch.anchor_hand) * config.scale;
  return hand.position * config.scale;
}

inline Vec3 clamp_to_room(const Vec3& p, const Aabb& room, double clearance) {
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    const double lo = room.min[a] + clearance;
    const double hi = room.max[a] - clearance;
    out[a] = lo <= hi ? std::clamp(p[a], lo, hi) : 0.5 * (room.min[a] + room.max[a]);
  }
  return out;
}

inline Vec3 map_hand_to_goal(const HandPose& hand, const ClutchState& clutch,
                             const MappingConfig& config, const Vec3& current_goal) {
  require_finite(hand.position, "hand position");
  if (!clutch.engaged) return current_goal;
  return clamp_to_room(scaled_goal(hand, clutch, config), config.room, config.clearance);
}

// Engaging anchors the hand and the current goal; re-engaging while engaged
// and releasing while released are no-ops.
inline ClutchState clutch_transition(const ClutchState& clutch, bool engage, const HandPose& hand,
                                     const Vec3& current_goal) {
  ClutchState next = clutch;
  if (engage && !clutch.engaged) {
    next.engaged = true;
    next.anchor_hand = hand.position;
    next.anchor_goal = current_goal;
  } else if (!engage) {
    next.engaged = false;
  }
  return next;
}

struct ResampledPose {
  HandPose pose;
  bool stale = false;  // no fresh sample for longer than the stale limit

  friend bool operator==(const ResampledPose&, const ResampledPose&) = default;
};

inline constexpr double kStaleInputLimit = 0.25;

// Zero-order hold onto the tick grid t_k = k*dt, from the first tick at or
// after the first sample to the last tick at or before the last sample.
// Timestamps within 1e-9 s of a grid point are treated as on-grid.
inline std::vector<ResampledPose> resample_input(const std::vector<HandPose>& stream, double dt,
                                                 double stale_limit = kStaleInputLimit) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  std::vector<ResampledPose> out;
  if (stream.empty()) return out;
  for (std::size_t i = 1; i < stream.size(); ++i)
    if (stream[i].timestamp < stream[i - 1].timestamp)
      throw DomainError("hand pose timestamps must be nondecreasing");

  constexpr double eps = 1e-9;
  const auto first = static_cast<long long>(std::ceil(stream.front().timestamp / dt - eps));
  const auto last = static_cast<long long>(std::floor(stream.back().timestamp / dt + eps));
  std::size_t j = 0;
  for (long long k = first; k <= last; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (j + 1 < stream.size() && stream[j + 1].timestamp <= t + eps) ++j;
    const HandPose& src = stream[j];
    out.push_back({{src.position, t}, t - src.timestamp >= stale_limit - eps});
  }
  return out;
}

// The goal starts at the drone's initial location.
inline Vec3 reset_goal(const Scenario& scenario) { return scenario.spawn; }

}  // namespace hapticopter
