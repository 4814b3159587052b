#include <gtest/gtest.h>

#include "hapticopter/sensing.hpp"
#include "support.hpp"

using namespace hapticopter;

TEST(Direction, BijectionWithAxes) {
  for (int i = 0; i < 6; ++i) {
    const Direction d = direction_from_index(i);
    EXPECT_EQ(index_of(d), i);
    EXPECT_EQ(direction_from_string(to_string(d)), d);
    EXPECT_EQ(opposite(opposite(d)), d);
    EXPECT_EQ(unit_vector(opposite(d)), -unit_vector(d));
    EXPECT_DOUBLE_EQ(unit_vector(d)[axis_of(d)], sign_of(d));
  }
  EXPECT_EQ(unit_vector(Direction::Front), (Vec3{1, 0, 0}));
  EXPECT_EQ(unit_vector(Direction::Left), (Vec3{0, 1, 0}));
  EXPECT_EQ(unit_vector(Direction::Down), (Vec3{0, 0, -1}));
  EXPECT_FALSE(direction_from_string("sideways"));
}

TEST(Raycast, HitsWallsAndBoxes) {
  const World w(kDefaultRoom, {Aabb{{1, -1, 0}, {2, 1, 2}}}, {});
  const DroneState s{{0, 0, 1}, {}, 0};
  const auto r = sense_six(s, w);
  EXPECT_DOUBLE_EQ(r[Direction::Front], 1.0);
  EXPECT_DOUBLE_EQ(r[Direction::Back], 4.0);  // wall at 5 m, capped
  EXPECT_DOUBLE_EQ(r[Direction::Up], 3.0);
  EXPECT_DOUBLE_EQ(r[Direction::Down], 1.0);
  EXPECT_DOUBLE_EQ(r[Direction::Left], 4.0);
}

TEST(Raycast, FaultsInsideSolidOrOutsideRoom) {
  const World w(kDefaultRoom, {Aabb{{1, -1, 0}, {2, 1, 2}}}, {});
  EXPECT_THROW(raycast_range({1.5, 0, 1}, Direction::Front, w), SensorFault);
  EXPECT_THROW(raycast_range({0, 0, 5}, Direction::Front, w), SensorFault);
  EXPECT_DOUBLE_EQ(raycast_range({1, 0, 1}, Direction::Front, w), 0.0);  // on the face
}

TEST(Raycast, MatchesRayMarchOracle) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const World w = test_support::random_world(rng);
    const Vec3 p = test_support::random_free_point(rng, w);
    const auto r = sense_six({p, {}, 0}, w);
    for (auto d : kDirections) {
      const double oracle = test_support::ray_march(p, d, w, kDefaultMaxRange);
      EXPECT_LE(r[d], oracle + 1e-12);
      EXPECT_GT(r[d], oracle - 1e-3 - 1e-12);
    }
  }
}

TEST(Raycast, QuarterTurnPermutesReadings) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const World w = test_support::random_world(rng);
    const Vec3 p = test_support::random_free_point(rng, w);
    const auto a = sense_six({p, {}, 0}, w);
    const auto b = sense_six({test_support::rotate_quarter(p), {}, 0}, test_support::rotate_quarter(w));
    EXPECT_EQ(b[Direction::Left], a[Direction::Front]);
    EXPECT_EQ(b[Direction::Back], a[Direction::Left]);
    EXPECT_EQ(b[Direction::Right], a[Direction::Back]);
    EXPECT_EQ(b[Direction::Front], a[Direction::Right]);
    EXPECT_EQ(b[Direction::Up], a[Direction::Up]);
    EXPECT_EQ(b[Direction::Down], a[Direction::Down]);
  }
}

TEST(Raycast, ReadingsBoundedByMaxRange) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const World w = test_support::random_world(rng);
    const Vec3 p = test_support::random_free_point(rng, w);
    const auto r = sense_six({p, {}, 0}, w, 2.0);
    for (double d : r.distances) {
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 2.0);
    }
  }
}
