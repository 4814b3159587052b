#pragma once

#include <algorithm>
#include <vector>

#include "hapticopter/vec3.hpp"
#include "hapticopter/world.hpp"

namespace hapticopter {

// Default gains give an overdamped 1 m step response (no overshoot) that
// enters the 2% band in ~2.2 s. The integral path is available but off by
// default: the point-mass plant has no steady disturbance to reject.
struct PidGains {
  double kp = 9.0;
  double ki = 0.0;
  double kd = 6.0;
  double i_max = 1.0;  // per-axis clamp on the integral state
  double a_max = 6.0;  // per-axis output clamp, m/s^2

  void validate() const {
    if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0))
      throw DomainError("PID gains must be non-negative");
    if (!(i_max >= 0.0) || !(a_max > 0.0))
      throw DomainError("PID clamps must be positive");
  }
};

struct PidState {
  Vec3 integral;
  Vec3 prev_error;
  bool initialized = false;

  friend bool operator==(const PidState&, const PidState&) = default;
};

struct SimConfig {
  double dt = 1.0 / 120.0;  // matches the 120 Hz hand-pose stream
  double drag = 0.3;        // linear drag, 1/s
  double v_max = 2.0;       // m/s
  double radius = 0.10;     // collision sphere, m

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive");
    if (!(drag >= 0.0)) throw DomainError("drag must be non-negative");
    if (!(v_max > 0.0)) throw DomainError("v_max must be positive");
    if (!(radius > 0.0)) throw DomainError("radius must be positive");
  }
};

struct DroneState {
  Vec3 position;
  Vec3 velocity;
  double time = 0.0;

  friend bool operator==(const DroneState&, const DroneState&) = default;
};

struct PidOutput {
  Vec3 accel;
  PidState state;
};

inline PidOutput pid_step(const PidState& state, const PidGains& gains, const Vec3& goal,
                          const Vec3& measured, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  require_finite(goal, "goal");
  require_finite(measured, "measured position");
  require_finite(state.integral, "PID integral");
  require_finite(state.prev_error, "PID previous error");

  const Vec3 error = goal - measured;
  PidState next;
  next.initialized = true;
  next.prev_error = error;
  Vec3 accel;
  for (int a = 0; a < 3; ++a) {
    next.integral[a] = std::clamp(state.integral[a] + error[a] * dt, -gains.i_max, gains.i_max);
    const double derivative = state.initialized ? (error[a] - state.prev_error[a]) / dt : 0.0;
    const double raw = gains.kp * error[a] + gains.ki * next.integral[a] + gains.kd * derivative;
    accel[a] = std::clamp(raw, -gains.a_max, gains.a_max);
  }
  return {accel, next};
}

// Semi-implicit Euler: velocity first (with drag and speed clamp), then
// position from the new velocity.
inline DroneState point_mass_step(const DroneState& state, const Vec3& accel,
                                  const SimConfig& config) {
  require_finite(state.position, "position");
  require_finite(state.velocity, "velocity");
  require_finite(accel, "acceleration");
  DroneState next;
  next.velocity =
      clamp_norm(state.velocity + (accel - state.velocity * config.drag) * config.dt, config.v_max);
  next.position = state.position + next.velocity * config.dt;
  next.time = state.time + config.dt;
  return next;
}

// Full simulation state carried between ticks. `touching` holds the sorted
// contact ids the drone was resting against after the previous tick, so a
// sustained scrape yields a single collision event.
struct SimState {
  DroneState drone;
  PidState pid;
  std::vector<int> touching;

  friend bool operator==(const SimState&, const SimState&) = default;
};

struct TickOutput {
  SimState state;
  std::vector<Contact> collisions;  // contact onsets during this tick
};

namespace detail {

// Distance under which a resolved sphere still counts as resting on a surface.
inline constexpr double kContactSlop = 1e-4;

inline std::vector<int> touching_ids(const Vec3& p, double radius, const World& world) {
  std::vector<int> ids;
  const double reach = radius + kContactSlop;
  const auto& solids = world.solids();
  for (std::size_t i = 0; i < solids.size(); ++i)
    if (distance(p, solids[i].closest_point(p)) <= reach) ids.push_back(static_cast<int>(i));
  const auto& room = world.room();
  for (int a = 0; a < 3; ++a) {
    if (p[a] - room.min[a] <= reach || room.max[a] - p[a] <= reach) {
      ids.insert(ids.begin(), kRoomContact);
      break;
    }
  }
  return ids;
}

}  // namespace detail

// One deterministic control + dynamics + contact tick. Penetrations are
// resolved by projecting the centre out along the contact normal and
// removing the inbound normal velocity (project-and-slide).
inline TickOutput sim_tick(const SimState& state, const Vec3& goal, const PidGains& gains,
                           const SimConfig& config, const World& world) {
  auto [accel, pid] = pid_step(state.pid, gains, goal, state.drone.position, config.dt);
  DroneState drone = point_mass_step(state.drone, accel, config);

  TickOutput out;
  std::vector<int> hit;
  for (int iter = 0; iter < 8; ++iter) {
    auto contact = collision_check(drone.position, config.radius, world);
    if (!contact) break;
    drone.position += contact->normal * contact->depth;
    const double vn = dot(drone.velocity, contact->normal);
    if (vn < 0.0) drone.velocity -= contact->normal * vn;
    if (std::find(hit.begin(), hit.end(), contact->id) == hit.end()) {
      hit.push_back(contact->id);
      if (!std::binary_search(state.touching.begin(), state.touching.end(), contact->id))
        out.collisions.push_back(*contact);
    }
  }

  std::vector<int> touching = detail::touching_ids(drone.position, config.radius, world);
  for (int id : hit)
    if (std::find(touching.begin(), touching.end(), id) == touching.end()) touching.push_back(id);
  std::sort(touching.begin(), touching.end());

  out.state = SimState{drone, pid, std::move(touching)};
  return out;
}

}  // namespace hapticopter
