#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hapticopter/loop.hpp"
#include "hapticopter/metrics.hpp"
#include "hapticopter/pilot.hpp"
#include "hapticopter/teleop.hpp"

namespace hapticopter {

struct ExperimentConfig {
  Scenario scenario;
  PilotPolicy policy;
  int repetitions = 1;
  double duration_limit = 40.0;  // s
  double hold_time = 3.0;        // s of zero commanded advance that ends a wall approach
  LoopConfig loop;
  MappingConfig mapping = simulation_mapping();

  double dt() const { return loop.sim.dt; }

  void validate() const {
    if (repetitions < 1) throw DomainError("repetitions must be at least 1");
    if (!(duration_limit > 0.0)) throw DomainError("duration limit must be positive");
    if (!(hold_time > 0.0)) throw DomainError("hold time must be positive");
    policy.validate();
    loop.validate();
    mapping.validate();
    scenario.validate(loop.sim.radius);
  }
};

enum class TrialOutcome { Finished, Timeout };

constexpr std::string_view to_string(TrialOutcome r) {
  return r == TrialOutcome::Finished ? "Finished" : "Timeout";
}

struct TrialResult {
  TrialLog log;
  bool completed = false;
  TrialOutcome reason = TrialOutcome::Timeout;
  std::uint64_t seed = 0;
  double depth_offset = 0.0;
};

inline std::uint64_t trial_seed(std::uint64_t base, int trial_index) {
  return base ^ static_cast<std::uint64_t>(trial_index);
}

// Closed loop pilot -> hand -> mapping -> PID/dynamics -> sensing -> cue ->
// pilot at a fixed dt until the task completes or the duration limit hits.
inline TrialResult run_trial(const ExperimentConfig& config, int trial_index) {
  config.validate();
  if (trial_index < 0) throw DomainError("trial index must be non-negative");
  const double dt = config.dt();
  const std::uint64_t seed = trial_seed(config.policy.seed, trial_index);

  SimulationLoop loop(config.scenario, config.loop);
  Pilot pilot(config.policy, config.scenario, seed);
  ClutchState clutch;
  clutch.mode = config.mapping.mode;

  const auto hold_ticks = static_cast<std::int64_t>(std::llround(config.hold_time / dt));
  const auto limit_ticks = static_cast<std::int64_t>(std::ceil(config.duration_limit / dt - 1e-9));
  std::int64_t held = 0;

  while (!loop.completed() && loop.tick() < limit_ticks) {
    const PilotCommand cmd = pilot.step({loop.state().drone, loop.cue()}, dt);
    const HandPose hand{cmd.target * (1.0 / config.mapping.scale), loop.time()};
    clutch = clutch_transition(clutch, cmd.engage, hand, loop.goal());
    const Vec3 goal = map_hand_to_goal(hand, clutch, config.mapping, loop.goal());
    loop.step(goal, clutch.engaged);
    if (config.scenario.task == Task::WallApproach) {
      held = cmd.holding ? held + 1 : 0;
      if (held >= hold_ticks) loop.mark_complete();
    }
  }

  TrialResult r;
  r.completed = loop.completed();
  r.reason = r.completed ? TrialOutcome::Finished : TrialOutcome::Timeout;
  r.log = loop.log();
  r.seed = seed;
  r.depth_offset = pilot.depth_offset();
  return r;
}

struct ExperimentRow {
  std::size_t config_index = 0;
  int trial = 0;
  Task task = Task::GateCourse;
  PilotKind policy = PilotKind::Waypoint;
  std::uint64_t seed = 0;
  std::optional<TrialResult> result;  // empty when the trial threw
  std::optional<MetricsSummary> metrics;
  std::string error;
};

// Runs every config for its repetition count. Rows come back ordered by
// (config, trial) whatever order the worker threads finished in; a failing
// trial fills its row's error and the batch continues.
inline std::vector<ExperimentRow> run_experiment(const std::vector<ExperimentConfig>& configs,
                                                 unsigned threads = 0, bool keep_logs = false) {
  if (configs.empty()) throw DomainError("run_experiment needs at least one config");
  std::vector<ExperimentRow> rows;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& cfg = configs[c];
    for (int i = 0; i < std::max(cfg.repetitions, 1); ++i) {
      ExperimentRow row;
      row.config_index = c;
      row.trial = i;
      row.task = cfg.scenario.task;
      row.policy = cfg.policy.kind;
      row.seed = trial_seed(cfg.policy.seed, i);
      rows.push_back(std::move(row));
    }
  }

  auto work = [&](ExperimentRow& row) {
    const auto& cfg = configs[row.config_index];
    try {
      TrialResult r = run_trial(cfg, row.trial);
      row.metrics = summarize_trial(r.log, cfg.scenario, cfg.duration_limit);
      if (!keep_logs) r.log = {};
      row.result = std::move(r);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) work(rows[i]);
    });
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace hapticopter
