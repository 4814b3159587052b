#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "hapticopter/sensing.hpp"

namespace hapticopter {

// Vibrotactile rendering parameters. Intensity follows i = M*T/d, saturated
// at M for d < T and silenced below `cutoff` (a fraction of M).
struct CueConfig {
  double max_intensity = 1.0;  // M, dimensionless duty fraction
  double threshold = 0.5;      // T, metres
  double cutoff = 0.15;        // i_min / M

  void validate() const {
    if (!(max_intensity > 0.0)) throw DomainError("max intensity must be positive");
    if (!(threshold > 0.0)) throw DomainError("threshold must be positive");
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw DomainError("cutoff must lie in [0, 1]");
  }
};

struct HapticCue {
  std::array<double, 6> intensities{};
  double max_intensity = 1.0;

  double operator[](Direction d) const {
    return intensities[static_cast<std::size_t>(index_of(d))];
  }
  double& operator[](Direction d) { return intensities[static_cast<std::size_t>(index_of(d))]; }

  friend bool operator==(const HapticCue&, const HapticCue&) = default;
};

inline double cue_intensity(double distance, const CueConfig& config) {
  if (std::isnan(distance) || distance < 0.0) throw DomainError("distance must be non-negative");
  const double m = config.max_intensity;
  if (distance == 0.0) return m;
  const double raw = m * config.threshold / distance;
  const double i = raw > m ? m : raw;
  return i < config.cutoff * m ? 0.0 : i;
}

inline HapticCue cue_from_ranges(const RangeReading& reading, const CueConfig& config = {}) {
  config.validate();
  HapticCue cue;
  cue.max_intensity = config.max_intensity;
  for (std::size_t k = 0; k < 6; ++k) cue.intensities[k] = cue_intensity(reading.distances[k], config);
  return cue;
}

struct PulseTrial {
  Direction direction = Direction::Front;
  double onset = 0.0;     // s
  double duration = 0.45; // s

  friend bool operator==(const PulseTrial&, const PulseTrial&) = default;
};

struct PulseScheduleConfig {
  double wait_min = 6.0;
  double wait_max = 12.0;
  double duration = 0.45;  // the measured mean reaction time
};

// Random stimulus schedule for cue-recognition sessions: each onset follows
// the previous one by a uniform wait in [wait_min, wait_max]; the first
// pulse comes after one such wait.
inline std::vector<PulseTrial> pulse_schedule(std::uint64_t seed, int n_trials,
                                              const PulseScheduleConfig& cfg = {}) {
  if (n_trials <= 0) throw DomainError("n_trials must be positive");
  if (!(cfg.wait_min > 0.0 && cfg.wait_min <= cfg.wait_max))
    throw DomainError("waits must satisfy 0 < wait_min <= wait_max");
  if (!(cfg.duration > 0.0)) throw DomainError("pulse duration must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_real_distribution<double> wait(cfg.wait_min, cfg.wait_max);
  std::vector<PulseTrial> out;
  out.reserve(static_cast<std::size_t>(n_trials));
  double t = 0.0;
  for (int i = 0; i < n_trials; ++i) {
    t += wait(rng);
    out.push_back({direction_from_index(pick(rng)), t, cfg.duration});
  }
  return out;
}

}  // namespace hapticopter
