#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "hapticopter/haptics.hpp"
#include "hapticopter/scenario.hpp"
#include "hapticopter/sim.hpp"

namespace hapticopter {

// Synthetic stand-ins for human pilots.
//   Waypoint:       flies the task route exactly, ignores haptics.
//   NoisyDepth:     as Waypoint, but every perceived x coordinate (the
//                   along-sight depth axis) is shifted by one Gaussian
//                   offset drawn per trial.
//   HapticReactive: NoisyDepth plus reactions to the vibrotactile cue.
enum class PilotKind { Waypoint, NoisyDepth, HapticReactive };

constexpr std::string_view to_string(PilotKind k) {
  switch (k) {
    case PilotKind::Waypoint: return "waypoint";
    case PilotKind::NoisyDepth: return "noisy-depth";
    case PilotKind::HapticReactive: return "haptic-reactive";
  }
  return "?";
}

inline std::optional<PilotKind> pilot_kind_from_string(std::string_view s) {
  if (s == "waypoint" || s == "Waypoint") return PilotKind::Waypoint;
  if (s == "noisy-depth" || s == "NoisyDepth") return PilotKind::NoisyDepth;
  if (s == "haptic-reactive" || s == "HapticReactive") return PilotKind::HapticReactive;
  return std::nullopt;
}

struct PilotPolicy {
  PilotKind kind = PilotKind::Waypoint;
  std::vector<Vec3> waypoints;  // explicit route; empty means "derive from the scenario"
  std::uint64_t seed = 0;       // base seed; trial i uses seed ^ i

  double depth_sigma = 0.3;         // m, std of the per-trial depth offset
  double reaction_threshold = 0.6;  // rho, fraction of M: backoff onset
  double hold_threshold = 0.8;      // rho_hold, fraction of M: approach halt
  double backoff_gain = 0.3;        // m of retreat commanded at full intensity

  double cruise_speed = 0.8;       // m/s, command point rate between waypoints
  double approach_speed = 0.4;     // m/s, near obstacles and during sweeps
  double creep_speed = 0.15;       // m/s, cue-guided final approach
  double capture_radius = 0.15;    // m
  double approach_standoff = 0.9;  // m, visual aim: centre-to-face distance to the wall
  double gate_standoff = 0.5;      // m, hover distance in front of a gate face
  double sweep_half_span = 1.5;    // m, lateral sweep around the perceived opening
  double course_offset = 0.6;      // m, pre/post waypoint distance at course gates
  double post_distance = 0.8;      // m, target beyond a crossed gate

  void validate() const {
    if (!(depth_sigma >= 0.0)) throw DomainError("depth sigma must be non-negative");
    if (!(reaction_threshold > 0.0 && reaction_threshold < 1.0))
      throw DomainError("reaction threshold must lie in (0, 1)");
    if (!(hold_threshold > 0.0 && hold_threshold < 1.0))
      throw DomainError("hold threshold must lie in (0, 1)");
    if (!(backoff_gain >= 0.0)) throw DomainError("backoff gain must be non-negative");
    if (!(cruise_speed > 0.0 && approach_speed > 0.0 && creep_speed > 0.0))
      throw DomainError("pilot speeds must be positive");
    if (!(capture_radius > 0.0)) throw DomainError("capture radius must be positive");
  }
};

struct PilotObservation {
  DroneState state;
  HapticCue cue;
};

// Goal-space position the pilot wants the drone at. The harness turns it
// into a hand pose through the inverse of the teleoperation scaling.
struct PilotCommand {
  Vec3 target;
  bool engage = true;
  bool holding = false;  // final position reached and no advance commanded

  friend bool operator==(const PilotCommand&, const PilotCommand&) = default;
};

enum class LegKind { Travel, Approach, Sweep, Align, Cross };

struct Leg {
  LegKind kind = LegKind::Travel;
  Vec3 target;
  double speed = 0.0;
};

// Per-trial Gaussian depth offset. Zero when sigma is zero or the pilot has
// perfect depth perception.
inline double draw_depth_offset(const PilotPolicy& policy, std::uint64_t trial_seed) {
  if (policy.kind == PilotKind::Waypoint || policy.depth_sigma == 0.0) return 0.0;
  std::mt19937_64 rng(trial_seed);
  std::normal_distribution<double> normal(0.0, policy.depth_sigma);
  return normal(rng);
}

class Pilot {
 public:
  Pilot(PilotPolicy policy, const Scenario& scenario, std::uint64_t trial_seed)
      : policy_(std::move(policy)),
        depth_offset_(draw_depth_offset(policy_, trial_seed)),
        command_(scenario.spawn) {
    policy_.validate();
    if (!policy_.waypoints.empty()) {
      for (const auto& w : policy_.waypoints) legs_.push_back({LegKind::Travel, perceived(w), policy_.cruise_speed});
    } else {
      plan(scenario);
    }
  }

  double depth_offset() const { return depth_offset_; }
  bool done() const { return leg_ >= legs_.size(); }
  std::size_t leg_index() const { return leg_; }
  const std::vector<Leg>& legs() const { return legs_; }
  std::optional<double> detected_opening_center() const { return opening_center_; }

  PilotCommand step(const PilotObservation& obs, double dt) {
    advance_legs(obs);
    if (done()) return {command_, true, true};

    Leg& leg = legs_[leg_];
    const Vec3 before = command_;
    command_ = move_towards(command_, leg.target, leg.speed * dt);

    offset_ = Vec3{};
    if (policy_.kind == PilotKind::HapticReactive) {
      if (leg.kind == LegKind::Sweep) record_sweep(obs);
      offset_ = react(obs.cue, leg, before, dt);
    }

    PilotCommand cmd;
    cmd.target = command_ + offset_;
    cmd.engage = true;
    cmd.holding = leg.kind == LegKind::Approach && (approach_latched_ || command_ == before);
    return cmd;
  }

 private:
  Vec3 perceived(Vec3 p) const {
    p.x += depth_offset_;
    return p;
  }

  static Vec3 move_towards(const Vec3& from, const Vec3& to, double max_step) {
    const Vec3 d = to - from;
    const double n = norm(d);
    if (n <= max_step) return to;
    return from + d * (max_step / n);
  }

  void plan(const Scenario& sc) {
    const auto& world = sc.world;
    switch (sc.task) {
      case Task::GateCourse: {
        Vec3 prev = sc.spawn;
        for (int id : sc.gate_order) {
          const Gate& g = *world.find_gate(id);
          const Vec3 c = g.opening_center();
          const double s = c[g.axis] >= prev[g.axis] ? 1.0 : -1.0;
          Vec3 pre = c;
          Vec3 post = c;
          pre[g.axis] -= s * policy_.course_offset;
          post[g.axis] += s * policy_.course_offset;
          legs_.push_back({LegKind::Travel, perceived(pre), policy_.cruise_speed});
          legs_.push_back({LegKind::Travel, perceived(post), policy_.cruise_speed});
          prev = post;
        }
        break;
      }
      case Task::WallApproach: {
        Vec3 aim = sc.spawn;
        aim.x = sc.wall().min.x - policy_.approach_standoff;
        legs_.push_back({LegKind::Approach, perceived(aim), policy_.approach_speed});
        break;
      }
      case Task::LateralGate:
      case Task::VerticalGate: {
        const Gate& g = *world.find_gate(sc.gate_order.front());
        const int axis = g.axis;
        const double s = g.plane >= sc.spawn[axis] ? 1.0 : -1.0;
        double near_face = g.plane;
        double far_face = g.plane;
        for (const auto& b : g.frame) {
          near_face = s > 0 ? std::min(near_face, b.min[axis]) : std::max(near_face, b.max[axis]);
          far_face = s > 0 ? std::max(far_face, b.max[axis]) : std::min(far_face, b.min[axis]);
        }
        sweep_axis_ = axis == 0 ? 1 : 0;
        through_ = axis == 0 ? (s > 0 ? Direction::Front : Direction::Back)
                 : axis == 1 ? (s > 0 ? Direction::Left : Direction::Right)
                             : (s > 0 ? Direction::Up : Direction::Down);

        // Hover point in front of the opening; in-plane coordinates other than
        // the sweep axis come from the opening centre (or the spawn height for
        // tall openings).
        Vec3 base = g.opening_center();
        const int va = plane_v_axis(axis);
        if (va == 2) {
          const double lo = g.opening.v_min + 0.3;
          const double hi = g.opening.v_max - 0.3;
          base.z = lo <= hi ? std::clamp(sc.spawn.z, lo, hi) : g.opening.v_center();
        }
        base[axis] = near_face - s * policy_.gate_standoff;
        base = perceived(base);

        Vec3 start = base;
        Vec3 end = base;
        start[sweep_axis_] -= policy_.sweep_half_span;
        end[sweep_axis_] += policy_.sweep_half_span;
        Vec3 post = base;
        post[axis] = far_face + s * policy_.post_distance;
        perceived_center_ = base[sweep_axis_];

        legs_.push_back({LegKind::Travel, start, policy_.cruise_speed});
        legs_.push_back({LegKind::Sweep, end, policy_.approach_speed});
        legs_.push_back({LegKind::Align, base, policy_.approach_speed});
        legs_.push_back({LegKind::Cross, post, policy_.approach_speed});
        break;
      }
    }
  }

  void advance_legs(const PilotObservation& obs) {
    while (!done()) {
      const Leg& leg = legs_[leg_];
      if (leg.kind == LegKind::Approach || leg.kind == LegKind::Cross) return;
      // Capture is judged against the intended position, including any
      // haptic retreat currently superimposed.
      const bool reached = command_ == leg.target &&
                           distance(obs.state.position, leg.target + offset_) <= policy_.capture_radius;
      if (!reached) return;
      if (leg.kind == LegKind::Sweep) finish_sweep();
      ++leg_;
    }
  }

  // The opening is the longest run of "through" readings that is bounded by
  // blocked readings on both sides; its midpoint becomes the crossing
  // coordinate. Without such a run the perceived centre is kept.
  void record_sweep(const PilotObservation& obs) {
    const double m = obs.cue.max_intensity;
    const bool open = obs.cue[through_] < 0.5 * policy_.reaction_threshold * m;
    const double x = obs.state.position[sweep_axis_];
    if (open) {
      if (seen_blocked_ && !run_start_) run_start_ = x;
      last_open_ = x;
    } else {
      if (run_start_) {
        const double width = std::fabs(last_open_ - *run_start_);
        if (!best_run_ || width > std::fabs(best_run_->second - best_run_->first))
          best_run_ = std::make_pair(*run_start_, last_open_);
        run_start_.reset();
      }
      seen_blocked_ = true;
    }
  }

  void finish_sweep() {
    if (policy_.kind == PilotKind::HapticReactive && best_run_)
      opening_center_ = 0.5 * (best_run_->first + best_run_->second);
    const double crossing = opening_center_.value_or(perceived_center_);
    for (std::size_t i = leg_ + 1; i < legs_.size(); ++i) legs_[i].target[sweep_axis_] = crossing;
  }

  // Haptic layer: a retreat offset proportional to how far each cue exceeds
  // the reaction threshold.
  // On the wall approach the front axis uses the hold band instead: the
  // pilot trusts the cue over its own depth estimate, creeping forward
  // while the wall is felt but still far, and stopping once the cue
  // reaches rho_hold.
  Vec3 react(const HapticCue& cue, Leg& leg, const Vec3& before, double dt) {
    const double rho = policy_.reaction_threshold;
    const double hold = policy_.hold_threshold;
    Vec3 offset;
    for (auto d : kDirections) {
      const double level = cue[d] / cue.max_intensity;
      const Vec3 u = unit_vector(d);
      if (leg.kind == LegKind::Approach && d == Direction::Front) {
        if (level >= hold) approach_latched_ = true;
        if (level > hold) offset -= u * (policy_.backoff_gain * (level - hold) / (1.0 - hold));
      } else if (level > rho) {
        offset -= u * (policy_.backoff_gain * (level - rho) / (1.0 - rho));
      }
    }
    if (leg.kind == LegKind::Approach) {
      if (approach_latched_) {
        command_.x = std::min(command_.x, before.x);
        leg.target = command_;
      } else if (command_ == leg.target && cue[Direction::Front] > 0.0) {
        command_.x += policy_.creep_speed * dt;
        leg.target = command_;
      }
    }
    return offset;
  }

  PilotPolicy policy_;
  double depth_offset_ = 0.0;
  Vec3 command_;
  Vec3 offset_;
  std::vector<Leg> legs_;
  std::size_t leg_ = 0;

  // Pass-through sweep state.
  int sweep_axis_ = 0;
  Direction through_ = Direction::Front;
  double perceived_center_ = 0.0;
  bool seen_blocked_ = false;
  std::optional<double> run_start_;
  double last_open_ = 0.0;
  std::optional<std::pair<double, double>> best_run_;
  std::optional<double> opening_center_;

  bool approach_latched_ = false;
};

// Single-step entry points mirroring the three policies. Each advances the
// given pilot (whose kind must match) by one control period.
inline PilotCommand waypoint_pilot_step(Pilot& pilot, const PilotObservation& obs, double dt) {
  return pilot.step(obs, dt);
}
inline PilotCommand noisy_depth_pilot_step(Pilot& pilot, const PilotObservation& obs, double dt) {
  return pilot.step(obs, dt);
}
inline PilotCommand haptic_reactive_pilot_step(Pilot& pilot, const PilotObservation& obs,
                                               double dt) {
  return pilot.step(obs, dt);
}

}  // namespace hapticopter
