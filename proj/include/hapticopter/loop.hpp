#pragma once

#include <cstdint>
#include <vector>

#include "hapticopter/haptics.hpp"
#include "hapticopter/scenario.hpp"
#include "hapticopter/sensing.hpp"
#include "hapticopter/sim.hpp"
#include "hapticopter/teleop.hpp"
#include "hapticopter/trial_log.hpp"

namespace hapticopter {

struct LoopConfig {
  SimConfig sim;
  PidGains gains;
  CueConfig cue;
  double max_range = kDefaultMaxRange;

  void validate() const {
    sim.validate();
    gains.validate();
    cue.validate();
    if (!(max_range > 0.0)) throw DomainError("max_range must be positive");
  }
};

// The authoritative per-tick pipeline shared by batch trials and live
// sessions: PID + dynamics + contacts, gate crossings, sensing and cue,
// with everything appended to a TrialLog. Sample k sits at time k*dt.
class SimulationLoop {
 public:
  SimulationLoop(Scenario scenario, LoopConfig config)
      : scenario_(std::move(scenario)), config_(config) {
    config_.validate();
    scenario_.validate(config_.sim.radius);
    state_.drone.position = scenario_.spawn;
    goal_ = reset_goal(scenario_);
    cue_ = sense_cue();
    log_.samples.push_back({0.0, state_.drone.position, goal_, cue_, false});
  }

  const Scenario& scenario() const { return scenario_; }
  const LoopConfig& config() const { return config_; }
  const SimState& state() const { return state_; }
  const Vec3& goal() const { return goal_; }
  const HapticCue& cue() const { return cue_; }
  const TrialLog& log() const { return log_; }
  std::int64_t tick() const { return tick_; }
  double time() const { return static_cast<double>(tick_) * config_.sim.dt; }
  bool completed() const { return completed_; }
  std::size_t gates_passed() const { return next_gate_; }

  // Advances one tick towards `goal`; returns the events it produced.
  std::vector<TrialEvent> step(const Vec3& goal, bool clutch_engaged) {
    require_finite(goal, "goal");
    goal_ = goal;
    const Vec3 prev = state_.drone.position;
    TickOutput out = sim_tick(state_, goal_, config_.gains, config_.sim, scenario_.world);
    state_ = std::move(out.state);
    ++tick_;
    const double t = time();

    std::vector<TrialEvent> events;
    for (const auto& c : out.collisions)
      events.push_back({t, EventKind::Collision, c.id, state_.drone.position, c.normal, false});
    for (const auto& g : scenario_.world.gates()) {
      auto x = gate_crossing_check(prev, state_.drone.position, g);
      if (!x) continue;
      events.push_back({t, EventKind::GateCross, x->gate_id, x->point, Vec3{}, x->through_opening});
      if (!completed_ && x->through_opening && next_gate_ < scenario_.gate_order.size() &&
          x->gate_id == scenario_.gate_order[next_gate_])
        ++next_gate_;
    }
    if (!completed_ && scenario_.task != Task::WallApproach && !scenario_.gate_order.empty() &&
        next_gate_ == scenario_.gate_order.size()) {
      completed_ = true;
      events.push_back({t, EventKind::TaskComplete, 0, state_.drone.position, Vec3{}, false});
    }

    cue_ = sense_cue();
    log_.samples.push_back({t, state_.drone.position, goal_, cue_, clutch_engaged});
    log_.events.insert(log_.events.end(), events.begin(), events.end());
    return events;
  }

  // Externally decided completion (the wall-approach hold criterion).
  std::vector<TrialEvent> mark_complete() {
    if (completed_) return {};
    completed_ = true;
    TrialEvent e{time(), EventKind::TaskComplete, 0, state_.drone.position, Vec3{}, false};
    log_.events.push_back(e);
    return {e};
  }

 private:
  HapticCue sense_cue() const {
    return cue_from_ranges(sense_six(state_.drone, scenario_.world, config_.max_range), config_.cue);
  }

  Scenario scenario_;
  LoopConfig config_;
  SimState state_;
  Vec3 goal_;
  HapticCue cue_;
  TrialLog log_;
  std::int64_t tick_ = 0;
  std::size_t next_gate_ = 0;
  bool completed_ = false;
};

}  // namespace hapticopter
