#pragma once

#include <string_view>
#include <vector>

#include "hapticopter/haptics.hpp"
#include "hapticopter/vec3.hpp"

namespace hapticopter {

struct TrialSample {
  double time = 0.0;
  Vec3 position;
  Vec3 goal;
  HapticCue cue;
  bool clutch_engaged = false;

  friend bool operator==(const TrialSample&, const TrialSample&) = default;
};

enum class EventKind { Collision, GateCross, TaskComplete };

constexpr std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Collision: return "Collision";
    case EventKind::GateCross: return "GateCross";
    case EventKind::TaskComplete: return "TaskComplete";
  }
  return "?";
}

// Collision: `target` is the contact id, `point` the drone centre, `normal`
//   the contact normal.
// GateCross: `target` is the gate id, `point` the crossing point,
//   `through_opening` whether it lies inside the opening.
struct TrialEvent {
  double time = 0.0;
  EventKind kind = EventKind::Collision;
  int target = 0;
  Vec3 point;
  Vec3 normal;
  bool through_opening = false;

  friend bool operator==(const TrialEvent&, const TrialEvent&) = default;
};

struct TrialLog {
  std::vector<TrialSample> samples;
  std::vector<TrialEvent> events;

  friend bool operator==(const TrialLog&, const TrialLog&) = default;
};

}  // namespace hapticopter
