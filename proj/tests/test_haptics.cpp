#include <gtest/gtest.h>

#include <map>
#include <random>

#include "hapticopter/haptics.hpp"

using namespace hapticopter;

TEST(Cue, LawAtReferenceDistances) {
  const CueConfig c;
  EXPECT_EQ(cue_intensity(0.5, c), 1.0);
  EXPECT_EQ(cue_intensity(1.0, c), 0.5);
  EXPECT_EQ(cue_intensity(0.25, c), 1.0);
  EXPECT_EQ(cue_intensity(4.0, c), 0.0);  // 0.125 is below the 0.15 cutoff
  EXPECT_EQ(cue_intensity(0.0, c), 1.0);
}

TEST(Cue, RejectsNegativeOrNaN) {
  EXPECT_THROW(cue_intensity(-0.1, {}), DomainError);
  EXPECT_THROW(cue_intensity(std::nan(""), {}), DomainError);
}

TEST(Cue, FromRanges) {
  RangeReading r;
  r.distances = {0.5, 1.0, 0.25, 4.0, 2.0, 3.5};
  const HapticCue cue = cue_from_ranges(r);
  EXPECT_EQ(cue[Direction::Front], 1.0);
  EXPECT_EQ(cue[Direction::Back], 0.5);
  EXPECT_EQ(cue[Direction::Left], 1.0);
  EXPECT_EQ(cue[Direction::Right], 0.0);
  EXPECT_EQ(cue[Direction::Up], 0.25);
  EXPECT_EQ(cue[Direction::Down], 0.0);
}

TEST(Cue, MonotoneClampedAndExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(1e-4, 6.0);
  const CueConfig c;
  for (int i = 0; i < 10000; ++i) {
    double a = d(rng);
    double b = d(rng);
    if (a > b) std::swap(a, b);
    const double ia = cue_intensity(a, c);
    const double ib = cue_intensity(b, c);
    EXPECT_GE(ia, ib);
    EXPECT_LE(ia, c.max_intensity);
    if (ia > 0.0 && ia < c.max_intensity) {
      EXPECT_NEAR(ia * a, c.max_intensity * c.threshold, 1e-12 * c.max_intensity * c.threshold);
    }
  }
}

TEST(Cue, ScalesWithMaxIntensity) {
  CueConfig c;
  c.max_intensity = 255.0;
  EXPECT_DOUBLE_EQ(cue_intensity(1.0, c), 127.5);
  EXPECT_DOUBLE_EQ(cue_intensity(0.1, c), 255.0);
  EXPECT_EQ(cue_intensity(3.5, c), 0.0);
}

TEST(Pulses, TwentyTrialsWithDefaults) {
  const auto s = pulse_schedule(42, 20);
  ASSERT_EQ(s.size(), 20u);
  double prev = 0.0;
  for (const auto& p : s) {
    EXPECT_GE(p.onset - prev, 6.0);
    EXPECT_LE(p.onset - prev, 12.0);
    EXPECT_EQ(p.duration, 0.45);
    prev = p.onset;
  }
  EXPECT_EQ(s, pulse_schedule(42, 20));
  EXPECT_NE(s, pulse_schedule(43, 20));
}

TEST(Pulses, DirectionsRoughlyUniform) {
  const auto s = pulse_schedule(7, 60000);
  std::map<Direction, int> n;
  for (const auto& p : s) ++n[p.direction];
  ASSERT_EQ(n.size(), 6u);
  for (const auto& [d, k] : n) EXPECT_NEAR(k / 60000.0, 1.0 / 6.0, 0.01);
}

TEST(Pulses, RejectsBadArguments) {
  EXPECT_THROW(pulse_schedule(1, 0), DomainError);
  EXPECT_THROW(pulse_schedule(1, 5, {12.0, 6.0, 0.45}), DomainError);
  EXPECT_THROW(pulse_schedule(1, 5, {0.0, 6.0, 0.45}), DomainError);
}
