#pragma once

#include <array>
#include <limits>
#include <vector>

#include "hapticopter/scenario.hpp"
#include "hapticopter/sensing.hpp"
#include "hapticopter/trial_log.hpp"

namespace hapticopter {

struct MetricsSummary {
  bool completed = false;
  double completion_time = 0.0;  // s; the duration limit when incomplete
  double path_length = 0.0;      // m
  int collisions = 0;            // contact onsets
  double min_wall_distance = std::numeric_limits<double>::quiet_NaN();  // WallApproach only
  std::vector<Vec3> crossing_points;

  friend bool operator==(const MetricsSummary& a, const MetricsSummary& b) {
    const bool walls_equal = (std::isnan(a.min_wall_distance) && std::isnan(b.min_wall_distance)) ||
                             a.min_wall_distance == b.min_wall_distance;
    return a.completed == b.completed && a.completion_time == b.completion_time &&
           a.path_length == b.path_length && a.collisions == b.collisions && walls_equal &&
           a.crossing_points == b.crossing_points;
  }
};

inline double path_length(const std::vector<TrialSample>& samples) {
  double total = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k)
    total += distance(samples[k].position, samples[k - 1].position);
  return total;
}

// Centre-to-face distance from the drone to the target wall's front face.
inline double wall_distance(const Vec3& p, const Scenario& scenario) {
  return scenario.wall().min.x - p.x;
}

inline MetricsSummary summarize_trial(const TrialLog& log, const Scenario& scenario,
                                      double duration_limit) {
  if (log.samples.empty()) throw DomainError("trial log has no samples");
  MetricsSummary m;
  const double start = log.samples.front().time;
  m.completion_time = duration_limit;
  for (const auto& e : log.events) {
    switch (e.kind) {
      case EventKind::Collision: ++m.collisions; break;
      case EventKind::GateCross: m.crossing_points.push_back(e.point); break;
      case EventKind::TaskComplete:
        if (!m.completed) {
          m.completed = true;
          m.completion_time = e.time - start;
        }
        break;
    }
  }
  m.path_length = path_length(log.samples);
  if (scenario.task == Task::WallApproach) {
    m.min_wall_distance = std::numeric_limits<double>::infinity();
    for (const auto& s : log.samples)
      m.min_wall_distance = std::min(m.min_wall_distance, wall_distance(s.position, scenario));
  }
  return m;
}

// ---- cue recognition --------------------------------------------------------

struct RecognitionTrial {
  Direction actual = Direction::Front;
  Direction reported = Direction::Front;
};

// Column order of the published recognition table.
inline constexpr std::array<Direction, 6> kTableOrder{Direction::Back,  Direction::Front,
                                                      Direction::Left,  Direction::Right,
                                                      Direction::Up,    Direction::Down};

struct ConfusionMatrix {
  // percent[actual][reported], indexed by Direction; each non-empty row sums to 100.
  std::array<std::array<double, 6>, 6> percent{};
  std::array<int, 6> row_counts{};
  std::array<bool, 6> empty_row{};
  double accuracy = 0.0;  // percent of trials reported correctly

  double at(Direction actual, Direction reported) const {
    return percent[static_cast<std::size_t>(index_of(actual))]
                  [static_cast<std::size_t>(index_of(reported))];
  }

  // One row with columns permuted into kTableOrder.
  std::array<double, 6> table_row(Direction actual) const {
    std::array<double, 6> out{};
    for (std::size_t c = 0; c < 6; ++c) out[c] = at(actual, kTableOrder[c]);
    return out;
  }
};

inline ConfusionMatrix confusion_matrix(const std::vector<RecognitionTrial>& trials) {
  if (trials.empty()) throw DomainError("confusion matrix needs at least one trial");
  std::array<std::array<int, 6>, 6> counts{};
  int correct = 0;
  for (const auto& t : trials) {
    ++counts[static_cast<std::size_t>(index_of(t.actual))]
            [static_cast<std::size_t>(index_of(t.reported))];
    if (t.actual == t.reported) ++correct;
  }
  ConfusionMatrix cm;
  for (std::size_t r = 0; r < 6; ++r) {
    int n = 0;
    for (int c : counts[r]) n += c;
    cm.row_counts[r] = n;
    cm.empty_row[r] = n == 0;
    for (std::size_t c = 0; c < 6; ++c)
      cm.percent[r][c] = n == 0 ? 0.0 : 100.0 * counts[r][c] / n;
  }
  cm.accuracy = 100.0 * correct / static_cast<double>(trials.size());
  return cm;
}

}  // namespace hapticopter
