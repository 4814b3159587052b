#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "hapticopter/sim.hpp"
#include "hapticopter/world.hpp"

namespace hapticopter {

class SensorFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tactor / ranger directions. Yaw is locked to the operator frame, so body
// axes coincide with world axes.
enum class Direction : int { Front = 0, Back = 1, Left = 2, Right = 3, Up = 4, Down = 5 };

inline constexpr std::array<Direction, 6> kDirections{Direction::Front, Direction::Back,
                                                      Direction::Left,  Direction::Right,
                                                      Direction::Up,    Direction::Down};

constexpr int index_of(Direction d) { return static_cast<int>(d); }

constexpr Direction direction_from_index(int i) {
  if (i < 0 || i > 5) throw DomainError("direction index out of range");
  return static_cast<Direction>(i);
}

constexpr int axis_of(Direction d) { return index_of(d) / 2; }
constexpr double sign_of(Direction d) { return index_of(d) % 2 == 0 ? 1.0 : -1.0; }

constexpr Vec3 unit_vector(Direction d) {
  Vec3 v;
  v[axis_of(d)] = sign_of(d);
  return v;
}

constexpr Direction opposite(Direction d) { return static_cast<Direction>(index_of(d) ^ 1); }

constexpr std::string_view to_string(Direction d) {
  constexpr std::array<std::string_view, 6> names{"front", "back", "left", "right", "up", "down"};
  return names[static_cast<std::size_t>(index_of(d))];
}

inline std::optional<Direction> direction_from_string(std::string_view s) {
  for (auto d : kDirections)
    if (to_string(d) == s) return d;
  return std::nullopt;
}

inline constexpr double kDefaultMaxRange = 4.0;

struct RangeReading {
  std::array<double, 6> distances{};
  double max_range = kDefaultMaxRange;

  double operator[](Direction d) const { return distances[static_cast<std::size_t>(index_of(d))]; }

  friend bool operator==(const RangeReading&, const RangeReading&) = default;
};

// Distance along an axis ray to the first solid face or room wall, capped at
// max_range (max_range itself means "no return").
inline double raycast_range(const Vec3& origin, Direction direction, const World& world,
                            double max_range = kDefaultMaxRange) {
  if (!(max_range > 0.0)) throw DomainError("max_range must be positive");
  require_finite(origin, "ray origin");
  const auto& solids = world.solids();
  for (const auto& b : solids)
    if (b.strictly_contains(origin)) throw SensorFault("ray origin lies inside an obstacle");
  if (!world.room().contains(origin)) throw SensorFault("ray origin lies outside the room");

  const int a = axis_of(direction);
  const int u = (a + 1) % 3;
  const int v = (a + 2) % 3;
  const bool positive = sign_of(direction) > 0.0;

  double best = positive ? world.room().max[a] - origin[a] : origin[a] - world.room().min[a];
  for (const auto& b : solids) {
    if (origin[u] < b.min[u] || origin[u] > b.max[u] || origin[v] < b.min[v] ||
        origin[v] > b.max[v])
      continue;
    if (positive && b.min[a] >= origin[a])
      best = std::min(best, b.min[a] - origin[a]);
    else if (!positive && b.max[a] <= origin[a])
      best = std::min(best, origin[a] - b.max[a]);
  }
  return std::min(best, max_range);
}

inline RangeReading sense_six(const DroneState& state, const World& world,
                              double max_range = kDefaultMaxRange) {
  RangeReading r;
  r.max_range = max_range;
  for (auto d : kDirections)
    r.distances[static_cast<std::size_t>(index_of(d))] =
        raycast_range(state.position, d, world, max_range);
  return r;
}

}  // namespace hapticopter
