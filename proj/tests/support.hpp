#pragma once

// Shared oracles and generators for the unit tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "hapticopter/scenario.hpp"
#include "hapticopter/sensing.hpp"

namespace hapticopter::test_support {

// Random obstacle field inside the default room.
inline World random_world(std::mt19937_64& rng, int boxes = 6) {
  std::uniform_real_distribution<double> xy(-4.5, 3.5);
  std::uniform_real_distribution<double> z(0.0, 3.0);
  std::uniform_real_distribution<double> size(0.2, 1.5);
  std::vector<Aabb> obs;
  for (int k = 0; k < boxes; ++k) {
    const Vec3 lo{xy(rng), xy(rng), z(rng)};
    Vec3 hi = lo + Vec3{size(rng), size(rng), size(rng)};
    hi.z = std::min(hi.z, kDefaultRoom.max.z);
    obs.push_back({lo, hi});
  }
  return World(kDefaultRoom, std::move(obs), {});
}

// Point in the room that is not strictly inside any solid.
inline Vec3 random_free_point(std::mt19937_64& rng, const World& w) {
  std::uniform_real_distribution<double> xy(-4.99, 4.99);
  std::uniform_real_distribution<double> z(0.01, 3.99);
  for (;;) {
    const Vec3 p{xy(rng), xy(rng), z(rng)};
    bool inside = false;
    for (const auto& b : w.solids()) inside = inside || b.strictly_contains(p);
    if (!inside) return p;
  }
}

// Marches the ray in 1 mm steps until it enters a solid or leaves the room.
inline double ray_march(const Vec3& origin, Direction d, const World& w, double max_range) {
  const Vec3 u = unit_vector(d);
  constexpr double step = 1e-3;
  for (int k = 1;; ++k) {
    const double t = k * step;
    if (t >= max_range) return max_range;
    const Vec3 p = origin + u * t;
    if (!w.room().strictly_contains(p)) return t;
    for (const auto& b : w.solids())
      if (b.contains(p)) return t;
  }
}

// Quarter turn about +z: (x, y, z) -> (-y, x, z).
inline Vec3 rotate_quarter(const Vec3& p) { return {-p.y, p.x, p.z}; }

inline Aabb rotate_quarter(const Aabb& b) {
  const Vec3 a = rotate_quarter(b.min);
  const Vec3 c = rotate_quarter(b.max);
  return {{std::min(a.x, c.x), std::min(a.y, c.y), std::min(a.z, c.z)},
          {std::max(a.x, c.x), std::max(a.y, c.y), std::max(a.z, c.z)}};
}

// The default room is symmetric under the quarter turn.
inline World rotate_quarter(const World& w) {
  std::vector<Aabb> obs;
  for (const auto& b : w.obstacles()) obs.push_back(rotate_quarter(b));
  return World(rotate_quarter(w.room()), std::move(obs), {});
}

}  // namespace hapticopter::test_support

#include "hapticopter/gateway/session.hpp"

namespace hapticopter::test_support {

// Drives a SessionCore the way a jittery live client would: a random-walk
// hand streamed every tick, clutch toggles, occasional resets, pauses long
// enough to go stale, a malformed message now and then, and deliveries
// delayed by up to two ticks so arrivals interleave out of seq order.
inline gateway::SessionCore scripted_session(std::uint64_t seed, double seconds,
                                             Task task = Task::GateCourse) {
  using namespace gateway;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.002);
  std::uniform_int_distribution<int> delay(0, 2);

  SessionConfig cfg;
  cfg.seed = seed;
  SessionCore core(build_scenario(task), cfg);
  std::int64_t seq = 1;
  core.handle_message({MessageKind::Hello, seq++, 0.0, {{"version", kProtocolVersion}}});

  const Aabb ws = cfg.mapping.workspace();
  Vec3 hand = build_scenario(task).spawn * (1.0 / cfg.mapping.scale);
  bool engaged = false;
  int pause = 0;
  std::multimap<std::int64_t, WireMessage> in_flight;
  const auto ticks = static_cast<std::int64_t>(seconds / cfg.loop.sim.dt);
  for (std::int64_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * cfg.loop.sim.dt;
    auto send = [&](MessageKind kind, json payload) {
      in_flight.emplace(k + delay(rng), WireMessage{kind, seq++, t, std::move(payload)});
    };
    if (pause > 0) {
      --pause;
    } else {
      for (int a = 0; a < 3; ++a)
        hand[a] = std::clamp(hand[a] + jitter(rng), ws.min[a] + 0.05, ws.max[a] - 0.05);
      send(MessageKind::HandInput, {{"position", vec_json(hand)}});
      if (unit(rng) < 1.0 / 300) pause = 45;
    }
    if (unit(rng) < 1.0 / 150) {
      engaged = !engaged;
      send(MessageKind::ClutchInput, {{"engaged", engaged}});
    }
    if (unit(rng) < 1.0 / 900) send(MessageKind::ResetGoal, json::object());
    if (unit(rng) < 1.0 / 600) send(MessageKind::HandInput, {{"position", "here"}});
    if (unit(rng) < 1.0 / 2400)
      send(MessageKind::LoadScenario, {{"scenario", std::string(to_string(kTasks[k % 4]))}});

    std::vector<WireMessage> due;
    for (auto it = in_flight.begin(); it != in_flight.end() && it->first <= k;)
      due.push_back(std::move(it->second)), it = in_flight.erase(it);
    std::shuffle(due.begin(), due.end(), rng);
    for (const auto& m : due) core.handle_message(m);
    core.tick();
  }
  return core;
}

}  // namespace hapticopter::test_support
