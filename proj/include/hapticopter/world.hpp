#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hapticopter/vec3.hpp"

namespace hapticopter {

// Raised when world or scenario geometry violates its invariants.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Aabb {
  Vec3 min;
  Vec3 max;

  bool valid() const { return min.x < max.x && min.y < max.y && min.z < max.z; }
  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 size() const { return max - min; }

  // Closed-set membership.
  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
  bool strictly_contains(const Vec3& p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y && p.z > min.z &&
           p.z < max.z;
  }
  bool contains(const Aabb& b) const { return contains(b.min) && contains(b.max); }
  bool overlaps(const Aabb& b) const {
    return min.x < b.max.x && b.min.x < max.x && min.y < b.max.y && b.min.y < max.y &&
           min.z < b.max.z && b.min.z < max.z;
  }
  Vec3 closest_point(const Vec3& p) const {
    return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y),
            std::clamp(p.z, min.z, max.z)};
  }
  Aabb translated(const Vec3& d) const { return {min + d, max + d}; }

  friend bool operator==(const Aabb&, const Aabb&) = default;
};

// Axis-aligned rectangle in the two in-plane coordinates of a gate.
struct Rect2 {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  bool valid() const { return u_min < u_max && v_min < v_max; }
  bool contains(double u, double v) const {
    return u >= u_min && u <= u_max && v >= v_min && v <= v_max;
  }
  double u_center() const { return 0.5 * (u_min + u_max); }
  double v_center() const { return 0.5 * (v_min + v_max); }

  friend bool operator==(const Rect2&, const Rect2&) = default;
};

// In-plane coordinate axes for a plane with the given normal axis:
// x-normal -> (y, z), y-normal -> (x, z), z-normal -> (x, y).
constexpr int plane_u_axis(int normal_axis) { return normal_axis == 0 ? 1 : 0; }
constexpr int plane_v_axis(int normal_axis) { return normal_axis == 2 ? 1 : 2; }

struct Gate {
  int id = 0;
  int axis = 0;         // normal axis of the crossing plane: 0=x, 1=y, 2=z
  double plane = 0.0;   // coordinate of the crossing plane along `axis`
  Rect2 opening;        // in-plane opening rectangle
  std::vector<Aabb> frame;

  Rect2 outline() const {
    const int ua = plane_u_axis(axis);
    const int va = plane_v_axis(axis);
    Rect2 r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& b : frame) {
      r.u_min = std::min(r.u_min, b.min[ua]);
      r.v_min = std::min(r.v_min, b.min[va]);
      r.u_max = std::max(r.u_max, b.max[ua]);
      r.v_max = std::max(r.v_max, b.max[va]);
    }
    return r;
  }

  // Point on the plane at the centre of the opening.
  Vec3 opening_center() const {
    Vec3 c;
    c[axis] = plane;
    c[plane_u_axis(axis)] = opening.u_center();
    c[plane_v_axis(axis)] = opening.v_center();
    return c;
  }

  void validate() const {
    const std::string tag = "gate " + std::to_string(id) + ": ";
    if (axis < 0 || axis > 2) throw ScenarioError(tag + "axis must be 0, 1 or 2");
    if (!std::isfinite(plane)) throw ScenarioError(tag + "plane must be finite");
    if (!opening.valid()) throw ScenarioError(tag + "degenerate opening");
    if (frame.empty()) throw ScenarioError(tag + "frame is empty");
    const int ua = plane_u_axis(axis);
    const int va = plane_v_axis(axis);
    for (const auto& b : frame) {
      if (!b.valid()) throw ScenarioError(tag + "frame box has non-positive extent");
      if (plane < b.min[axis] || plane > b.max[axis])
        throw ScenarioError(tag + "frame box does not straddle the crossing plane");
      const bool overlaps_opening = b.min[ua] < opening.u_max && opening.u_min < b.max[ua] &&
                                    b.min[va] < opening.v_max && opening.v_min < b.max[va];
      if (overlaps_opening) throw ScenarioError(tag + "frame box overlaps the opening");
    }
    const Rect2 o = outline();
    if (!(o.u_min < opening.u_min && opening.u_max < o.u_max && o.v_min < opening.v_min &&
          opening.v_max < o.v_max))
      throw ScenarioError(tag + "opening is not strictly inside the frame outline");
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

// Contact target id used for the room boundary.
inline constexpr int kRoomContact = -1;

struct Contact {
  int id = kRoomContact;  // solid index, or kRoomContact
  Vec3 normal;            // unit vector pointing from the obstacle towards the sphere centre
  double depth = 0.0;     // penetration depth, > 0
};

// Room bounds plus static geometry. Immutable after construction; the
// constructor enforces the invariants.
class World {
 public:
  World() = default;
  World(Aabb room, std::vector<Aabb> obstacles, std::vector<Gate> gates)
      : room_(room), obstacles_(std::move(obstacles)), gates_(std::move(gates)) {
    if (!room_.valid()) throw ScenarioError("room has non-positive extent");
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
      if (!obstacles_[i].valid())
        throw ScenarioError("obstacle " + std::to_string(i) + " has non-positive extent");
      if (!room_.contains(obstacles_[i]))
        throw ScenarioError("obstacle " + std::to_string(i) + " lies outside the room");
    }
    for (std::size_t i = 0; i < gates_.size(); ++i) {
      gates_[i].validate();
      for (std::size_t j = 0; j < i; ++j)
        if (gates_[j].id == gates_[i].id)
          throw ScenarioError("duplicate gate id " + std::to_string(gates_[i].id));
      for (const auto& b : gates_[i].frame)
        if (!room_.contains(b))
          throw ScenarioError("gate " + std::to_string(gates_[i].id) + " lies outside the room");
    }
    solids_ = obstacles_;
    for (const auto& g : gates_) solids_.insert(solids_.end(), g.frame.begin(), g.frame.end());
  }

  const Aabb& room() const { return room_; }
  const std::vector<Aabb>& obstacles() const { return obstacles_; }
  const std::vector<Gate>& gates() const { return gates_; }

  // Every solid box: obstacles first, then gate frames in gate order.
  // Contact ids index into this list.
  const std::vector<Aabb>& solids() const { return solids_; }

  const Gate* find_gate(int id) const {
    for (const auto& g : gates_)
      if (g.id == id) return &g;
    return nullptr;
  }

  World translated(const Vec3& d) const {
    std::vector<Aabb> obs;
    for (const auto& b : obstacles_) obs.push_back(b.translated(d));
    std::vector<Gate> gates = gates_;
    for (auto& g : gates) {
      g.plane += d[g.axis];
      const double du = d[plane_u_axis(g.axis)];
      const double dv = d[plane_v_axis(g.axis)];
      g.opening = {g.opening.u_min + du, g.opening.v_min + dv, g.opening.u_max + du,
                   g.opening.v_max + dv};
      for (auto& b : g.frame) b = b.translated(d);
    }
    return World(room_.translated(d), std::move(obs), std::move(gates));
  }

  friend bool operator==(const World& a, const World& b) {
    return a.room_ == b.room_ && a.obstacles_ == b.obstacles_ && a.gates_ == b.gates_;
  }

 private:
  Aabb room_{{0, 0, 0}, {1, 1, 1}};
  std::vector<Aabb> obstacles_;
  std::vector<Gate> gates_;
  std::vector<Aabb> solids_;
};

namespace detail {

inline std::optional<Contact> box_contact(const Vec3& p, double radius, const Aabb& box) {
  const Vec3 c = box.closest_point(p);
  if (c != p) {
    const Vec3 diff = p - c;
    const double d = norm(diff);
    if (d >= radius) return std::nullopt;
    return Contact{0, diff * (1.0 / d), radius - d};
  }
  // Centre on or inside the box: exit through the nearest face.
  double best = std::numeric_limits<double>::infinity();
  Vec3 normal;
  for (int a = 0; a < 3; ++a) {
    const double to_min = p[a] - box.min[a];
    const double to_max = box.max[a] - p[a];
    if (to_min < best) {
      best = to_min;
      normal = {};
      normal[a] = -1.0;
    }
    if (to_max < best) {
      best = to_max;
      normal = {};
      normal[a] = 1.0;
    }
  }
  return Contact{0, normal, radius + best};
}

inline std::optional<Contact> room_contact(const Vec3& p, double radius, const Aabb& room) {
  std::optional<Contact> deepest;
  for (int a = 0; a < 3; ++a) {
    const double gap_min = p[a] - room.min[a];
    const double gap_max = room.max[a] - p[a];
    if (gap_min < radius && (!deepest || radius - gap_min > deepest->depth)) {
      Vec3 n;
      n[a] = 1.0;
      deepest = Contact{kRoomContact, n, radius - gap_min};
    }
    if (gap_max < radius && (!deepest || radius - gap_max > deepest->depth)) {
      Vec3 n;
      n[a] = -1.0;
      deepest = Contact{kRoomContact, n, radius - gap_max};
    }
  }
  return deepest;
}

}  // namespace detail

// Deepest contact between a sphere and the world's solids or room walls.
// Touching (distance exactly equal to radius) is not a contact.
inline std::optional<Contact> collision_check(const Vec3& position, double radius,
                                              const World& world) {
  if (!(radius > 0.0)) throw DomainError("collision radius must be positive");
  require_finite(position, "position");
  std::optional<Contact> deepest;
  const auto& solids = world.solids();
  for (std::size_t i = 0; i < solids.size(); ++i) {
    auto c = detail::box_contact(position, radius, solids[i]);
    if (c && (!deepest || c->depth > deepest->depth)) {
      c->id = static_cast<int>(i);
      deepest = c;
    }
  }
  auto rc = detail::room_contact(position, radius, world.room());
  if (rc && (!deepest || rc->depth > deepest->depth)) deepest = rc;
  return deepest;
}

struct GateCrossing {
  int gate_id = 0;
  Vec3 point;
  bool through_opening = false;
  int direction = 0;  // +1 when moving towards +axis, -1 otherwise
};

// Detects the segment prev->curr piercing the gate plane inside the gate's
// outline. A point exactly on the plane counts as being on the + side.
inline std::optional<GateCrossing> gate_crossing_check(const Vec3& prev, const Vec3& curr,
                                                       const Gate& gate) {
  require_finite(prev, "prev");
  require_finite(curr, "curr");
  const int a = gate.axis;
  const bool prev_pos = prev[a] >= gate.plane;
  const bool curr_pos = curr[a] >= gate.plane;
  if (prev_pos == curr_pos) return std::nullopt;
  const double s0 = prev[a] - gate.plane;
  const double s1 = curr[a] - gate.plane;
  const double t = s0 / (s0 - s1);
  Vec3 p = prev + (curr - prev) * t;
  p[a] = gate.plane;
  const double u = p[plane_u_axis(a)];
  const double v = p[plane_v_axis(a)];
  if (!gate.outline().contains(u, v)) return std::nullopt;
  return GateCrossing{gate.id, p, gate.opening.contains(u, v), curr_pos ? 1 : -1};
}

}  // namespace hapticopter
