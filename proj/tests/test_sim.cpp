#include <gtest/gtest.h>

#include <random>

#include "hapticopter/scenario.hpp"
#include "hapticopter/sim.hpp"

using namespace hapticopter;

namespace {

World empty_world() { return World(kDefaultRoom, {}, {}); }

SimState at(Vec3 p) {
  SimState s;
  s.drone.position = p;
  return s;
}

}  // namespace

TEST(Pid, FirstCallHasNoDerivativeKick) {
  PidGains g;
  auto out = pid_step({}, g, {0.1, 0, 0}, {0, 0, 0}, 0.01);
  EXPECT_DOUBLE_EQ(out.accel.x, g.kp * 0.1);
  EXPECT_TRUE(out.state.initialized);
}

TEST(Pid, OutputAndIntegralAreClamped) {
  PidGains g;
  g.ki = 100.0;
  PidState s;
  for (int i = 0; i < 1000; ++i) {
    auto out = pid_step(s, g, {100, -100, 0}, {0, 0, 0}, 0.01);
    s = out.state;
    EXPECT_LE(std::fabs(out.accel.x), g.a_max);
    EXPECT_LE(std::fabs(out.accel.y), g.a_max);
  }
  EXPECT_DOUBLE_EQ(s.integral.x, g.i_max);
  EXPECT_DOUBLE_EQ(s.integral.y, -g.i_max);
}

TEST(Pid, RejectsBadInput) {
  EXPECT_THROW(pid_step({}, {}, {0, 0, 0}, {0, 0, 0}, 0.0), DomainError);
  EXPECT_THROW(pid_step({}, {}, {std::nan(""), 0, 0}, {0, 0, 0}, 0.01), DomainError);
}

TEST(Dynamics, SemiImplicitEuler) {
  SimConfig c;
  DroneState s{{0, 0, 1}, {1, 0, 0}, 0.0};
  auto n = point_mass_step(s, {0, 0, 0}, c);
  const double v = 1.0 - c.drag * c.dt;
  EXPECT_DOUBLE_EQ(n.velocity.x, v);
  EXPECT_DOUBLE_EQ(n.position.x, v * c.dt);
  EXPECT_DOUBLE_EQ(n.time, c.dt);
}

TEST(Dynamics, SpeedIsClamped) {
  SimConfig c;
  DroneState s{{0, 0, 1}, {0, 0, 0}, 0.0};
  for (int i = 0; i < 2000; ++i) {
    s = point_mass_step(s, {100, 100, 0}, c);
    EXPECT_LE(norm(s.velocity), c.v_max + 1e-12);
  }
}

TEST(SimTick, StepResponseSettlesWithoutOvershoot) {
  const World w = empty_world();
  SimState s = at({0, 0, 1});
  const Vec3 goal{1, 0, 1};
  double prev_err = 1.0;
  double settle = -1.0;
  for (int k = 1; k <= 600; ++k) {
    s = sim_tick(s, goal, {}, {}, w).state;
    const double err = std::fabs(1.0 - s.drone.position.x);
    EXPECT_LE(err, prev_err + 1e-15) << "tick " << k;  // monotone approach
    prev_err = err;
    if (settle < 0 && err < 0.02) settle = k / 120.0;
  }
  EXPECT_GT(settle, 0.0);
  EXPECT_LT(settle, 3.0);
  EXPECT_LT(prev_err, 1e-3);
}

TEST(SimTick, Deterministic) {
  const World w = build_scenario(Task::GateCourse).world;
  SimState a = at({-3, -3, 1});
  SimState b = a;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 goal{-3 + 0.004 * k, -3 + 0.002 * k, 1 + 0.001 * k};
    a = sim_tick(a, goal, {}, {}, w).state;
    b = sim_tick(b, goal, {}, {}, w).state;
  }
  EXPECT_EQ(a, b);
}

TEST(SimTick, NeverPenetratesAndCountsOnsetsOnce) {
  const World w(kDefaultRoom, {Aabb{{1, -1, 0}, {1.2, 1, 2.4}}}, {});
  SimState s = at({0, 0, 1});
  int onsets = 0;
  // Push into the wall, scrape along it, then leave and come back.
  for (int k = 0; k < 1200; ++k) {
    const Vec3 goal = k < 600 ? Vec3{3, 0.3, 1} : (k < 800 ? Vec3{0, 0, 1} : Vec3{3, -0.3, 1});
    auto out = sim_tick(s, goal, {}, {}, w);
    s = out.state;
    onsets += static_cast<int>(out.collisions.size());
    EXPECT_FALSE(collision_check(s.drone.position, 0.1 - 1e-9, w));
  }
  EXPECT_EQ(onsets, 2);
}

TEST(SimTick, SlidesAlongWall) {
  const World w(kDefaultRoom, {Aabb{{1, -3, 0}, {1.2, 3, 2.4}}}, {});
  SimState s = at({0.5, 0, 1});
  for (int k = 0; k < 600; ++k) s = sim_tick(s, {3, 2, 1}, {}, {}, w).state;
  EXPECT_NEAR(s.drone.position.x, 0.9, 1e-9);
  EXPECT_GT(s.drone.position.y, 1.5);
}

TEST(SimTick, RandomWalkKeepsInvariants) {
  const World w = build_scenario(Task::GateCourse).world;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-6, 6);
  SimState s = at({-3, -3, 1});
  Vec3 goal = s.drone.position;
  for (int k = 0; k < 5000; ++k) {
    if (k % 60 == 0) goal = {u(rng), u(rng), u(rng) * 0.5 + 2};
    s = sim_tick(s, goal, {}, {}, w).state;
    ASSERT_TRUE(is_finite(s.drone.position));
    ASSERT_LE(norm(s.drone.velocity), 2.0 + 1e-12);
    ASSERT_FALSE(collision_check(s.drone.position, 0.1 - 1e-9, w));
    ASSERT_TRUE(std::is_sorted(s.touching.begin(), s.touching.end()));
  }
}
