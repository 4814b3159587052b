// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "hapticopter/hapticopter.hpp"
#include "support.hpp"

using namespace hapticopter;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool run(const char* name, double limit_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < limit_s, fmt("runtime %.2f s over the %.0f s limit", secs, limit_s));
  if (c.ok)
    std::printf("PASS  %-28s (%.2f s)\n", name, secs);
  else
    std::printf("FAIL  %-28s (%.2f s) %s\n", name, secs, c.detail.c_str());
  std::fflush(stdout);
  return c.ok;
}

void cue_law(Check& c) {
  const CueConfig cfg;
  RangeReading r;
  r.distances = {0.5, 1.0, 0.25, 4.0, 4.0, 4.0};
  const HapticCue cue = cue_from_ranges(r, cfg);
  const double expected[4] = {1.0, 0.5, 1.0, 0.0};
  for (std::size_t k = 0; k < 4; ++k)
    c.expect(std::fabs(cue.intensities[k] - expected[k]) <= 1e-12,
             fmt("intensity at d=%g is %.17g", r.distances[k], cue.intensities[k]));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = d(rng), b = d(rng);
    const double lo = std::min(a, b), hi = std::max(a, b);
    c.expect(cue_intensity(lo, cfg) >= cue_intensity(hi, cfg), fmt("not monotone at %g, %g", lo, hi));
  }
}

void mapping(Check& c) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::uniform_real_distribution<double> h(0.1, 0.45);
  std::bernoulli_distribution coin(0.5);
  for (auto [cfg, scale] : {std::pair{simulation_mapping(), 8.0}, std::pair{hardware_mapping(), 6.0}}) {
    cfg.room = Aabb{{-100, -100, -100}, {100, 100, 100}};
    ClutchState on;
    on.engaged = true;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 p{u(rng), u(rng), h(rng)};
      const Vec3 g = map_hand_to_goal({p, 0}, on, cfg, {});
      for (int a = 0; a < 3; ++a)
        c.expect(std::fabs(g[a] - scale * p[a]) <= 1e-12, fmt("absolute goal off by %g", g[a] - scale * p[a]));
    }
  }
  const MappingConfig cfg;
  ClutchState off;
  const Vec3 held{1, 2, 1.5};
  for (int i = 0; i < 1000; ++i)
    c.expect(map_hand_to_goal({{u(rng), u(rng), h(rng)}, 0}, off, cfg, held) == held, "disengaged goal moved");

  MappingConfig rel;
  rel.mode = ClutchMode::Relative;
  ClutchState clutch;
  clutch.mode = ClutchMode::Relative;
  Vec3 goal{0, 0, 1.5};
  int engages = 0;
  while (engages < 1000) {
    const HandPose hand{{u(rng), u(rng), h(rng)}, 0};
    const bool want = coin(rng);
    const bool engaging = want && !clutch.engaged;
    clutch = clutch_transition(clutch, want, hand, goal);
    const Vec3 next = map_hand_to_goal(hand, clutch, rel, goal);
    if (engaging) {
      ++engages;
      c.expect(distance(next, goal) == 0.0, fmt("relative engage jumped %g m", distance(next, goal)));
    }
    goal = next;
  }
}

void pid_dynamics(Check& c) {
  const World w(Aabb{{-50, -50, -50}, {50, 50, 50}}, {}, {});
  const SimConfig cfg;
  const PidGains gains;
  auto simulate = [&] {
    std::vector<SimState> trace;
    SimState s;
    const Vec3 goal{1, 0, 0};
    for (int k = 0; k < 600; ++k) {
      s = sim_tick(s, goal, gains, cfg, w).state;
      trace.push_back(s);
    }
    return trace;
  };
  const auto a = simulate();
  double settle = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::fabs(a[k].drone.position.x - 1.0) > 0.02) settle = static_cast<double>(k + 1) * cfg.dt;
  c.expect(settle < 3.0, fmt("settles at %.3f s", settle));
  const double err5 = distance(a.back().drone.position, {1, 0, 0});
  c.expect(err5 < 1e-3, fmt("error at 5 s is %.3g m", err5));
  c.expect(simulate() == a, "reruns differ");
}

void raycast(Check& c) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const World w = test_support::random_world(rng);
    const Vec3 p = test_support::random_free_point(rng, w);
    const auto r = sense_six({p, {}, 0}, w);
    for (auto d : kDirections) {
      const double oracle = test_support::ray_march(p, d, w, kDefaultMaxRange);
      c.expect(std::fabs(r[d] - oracle) <= 1e-3 + 1e-12, fmt("pair %g: %g vs oracle %g", i, r[d], oracle));
    }
    const auto q = sense_six({test_support::rotate_quarter(p), {}, 0}, test_support::rotate_quarter(w));
    c.expect(q[Direction::Left] == r[Direction::Front] && q[Direction::Back] == r[Direction::Left] &&
                 q[Direction::Right] == r[Direction::Back] && q[Direction::Front] == r[Direction::Right] &&
                 q[Direction::Up] == r[Direction::Up] && q[Direction::Down] == r[Direction::Down],
             fmt("rotation permutation fails on pair %g", i));
  }
}

void statistics(Check& c) {
  const auto h = kruskal_wallis({{1, 2}, {3, 4}});
  c.expect(h.statistic == 2.4, fmt("H = %.17g", h.statistic));

  std::ifstream in(std::string(HAPTICOPTER_TEST_DATA) + "/stats_reference.json");
  const auto ref = nlohmann::json::parse(in);
  int n = 0;
  auto near = [&](double got, double want, double tol, const char* what) {
    c.expect(std::fabs(got - want) <= tol, std::string(what) + fmt(" %.17g vs %.17g", got, want));
  };
  for (const auto& cs : ref["cases"]) {
    Groups g;
    for (const auto& grp : cs["groups"]) g.push_back(grp.get<std::vector<double>>());
    const auto k = kruskal_wallis(g);
    const double hk = cs["kruskal"]["statistic"];
    near(k.statistic, hk, 1e-9 * std::max(1.0, hk), "H");
    near(k.p_value, cs["kruskal"]["p"], 1e-6, "H p");
    for (auto [center, key] : {std::pair{LeveneCenter::Mean, "levene_mean"},
                               std::pair{LeveneCenter::Median, "levene_median"}}) {
      const auto l = levene(g, center);
      const double wl = cs[key]["statistic"];
      near(l.statistic, wl, 1e-9 * std::max(1.0, wl), "W");
      near(l.p_value, cs[key]["p"], 1e-6, "W p");
    }
    ++n;
  }
  c.expect(n == 200, fmt("reference has %g cases", n));

  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> z(0, 1);
  const int sims = 10000;
  int kw = 0, lv = 0;
  for (int s = 0; s < sims; ++s) {
    Groups g(3);
    for (auto& grp : g)
      for (int k = 0; k < 50; ++k) grp.push_back(z(rng));
    kw += kruskal_wallis(g).p_value < 0.05;
    lv += levene(g).p_value < 0.05;
  }
  const double rk = kw / double(sims), rl = lv / double(sims);
  std::printf("      null rejection kruskal %.4f levene %.4f\n", rk, rl);
  c.expect(rk >= 0.04 && rk <= 0.06, fmt("kruskal null rejection %.4f", rk));
  c.expect(rl >= 0.04 && rl <= 0.06, fmt("levene null rejection %.4f", rl));
}

void confusion(Check& c) {
  std::vector<RecognitionTrial> t(19, RecognitionTrial{Direction::Up, Direction::Up});
  t.push_back({Direction::Up, Direction::Front});
  t.push_back({Direction::Up, Direction::Right});
  const auto row = confusion_matrix(t).table_row(Direction::Up);
  const double expected[6] = {0, 4.76, 0, 4.76, 90.48, 0};
  for (std::size_t k = 0; k < 6; ++k) {
    const double got = std::round(row[k] * 100) / 100;
    c.expect(std::fabs(got - expected[k]) < 1e-9, fmt("column %g is %.2f", k, got));
  }
}

double variance(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x / v.size();
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

void qualitative(Check& c) {
  std::vector<ExperimentConfig> cfgs;
  const std::array<Task, 3> tasks{Task::WallApproach, Task::LateralGate, Task::VerticalGate};
  for (auto t : tasks)
    for (auto k : {PilotKind::NoisyDepth, PilotKind::HapticReactive}) {
      ExperimentConfig e;
      e.scenario = build_scenario(t);
      e.policy.kind = k;
      e.policy.depth_sigma = 0.3;
      e.policy.seed = 1000;
      e.repetitions = 20;
      cfgs.push_back(e);
    }
  const auto rows = run_experiment(cfgs);
  int collisions[2] = {0, 0};
  std::vector<double> wall[2], cross[3][2];
  for (const auto& r : rows) {
    c.expect(r.error.empty(), "trial error: " + r.error);
    if (!r.metrics) continue;
    const int p = r.policy == PilotKind::HapticReactive;
    const auto& m = *r.metrics;
    collisions[p] += m.collisions;
    if (r.task == Task::WallApproach && m.collisions == 0) wall[p].push_back(m.min_wall_distance);
    if (r.task != Task::WallApproach && !m.crossing_points.empty())
      cross[static_cast<int>(r.config_index / 2)][p].push_back(m.crossing_points.back().x);
  }
  std::printf("      collisions noisy %d haptic %d\n", collisions[0], collisions[1]);
  c.expect(collisions[1] * 2 <= collisions[0], fmt("haptic collisions %g vs noisy %g", collisions[1], collisions[0]));
  c.expect(collisions[0] > 0, "noisy pilot never collided");
  c.expect(!wall[0].empty() && !wall[1].empty(), "no collision-free wall approaches");
  if (!wall[0].empty() && !wall[1].empty()) {
    double m0 = 0, m1 = 0;
    for (double x : wall[0]) m0 += x / wall[0].size();
    for (double x : wall[1]) m1 += x / wall[1].size();
    std::printf("      wall distance noisy %.4f haptic %.4f\n", m0, m1);
    c.expect(m1 < m0, fmt("haptic wall distance %.4f not below noisy %.4f", m1, m0));
  }
  for (int t = 1; t < 3; ++t) {
    c.expect(cross[t][0].size() > 1 && cross[t][1].size() > 1, "too few crossings");
    if (cross[t][0].size() < 2 || cross[t][1].size() < 2) continue;
    const double v0 = variance(cross[t][0]), v1 = variance(cross[t][1]);
    std::printf("      %s crossing-x variance noisy %.5f haptic %.5f\n", to_string(tasks[t]).data(), v0, v1);
    c.expect(v1 < v0, fmt("crossing variance %.5f not below %.5f", v1, v0));
  }
}

void record_replay(Check& c) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto live = test_support::scripted_session(7000 + seed, 10.0, kTasks[seed % 4]);
    const auto rec = gateway::record_from_string(gateway::record_to_string(gateway::record_session(live)));
    const auto replay = gateway::replay_core(rec);
    c.expect(replay.log() == live.log(), fmt("session %g log differs", seed));
    c.expect(replay.metrics() == live.metrics(), fmt("session %g metrics differ", seed));
  }
}

void pulses(Check& c) {
  const auto sched = pulse_schedule(42, 10000);
  double prev = 0.0;
  std::array<int, 6> counts{};
  for (const auto& p : sched) {
    const double gap = p.onset - prev;
    c.expect(gap >= 6.0 && gap <= 12.0, fmt("gap %.6f s", gap));
    c.expect(p.duration == 0.45, fmt("duration %g", p.duration));
    prev = p.onset;
    ++counts[static_cast<std::size_t>(index_of(p.direction))];
  }
  for (int k = 0; k < 6; ++k) {
    const double f = counts[static_cast<std::size_t>(k)] / 10000.0;
    c.expect(std::fabs(f - 1.0 / 6) <= 0.02, fmt("direction %g frequency %.4f", k, f));
  }
}

}  // namespace

int main() {
  bool ok = true;
  ok &= run("cue-law", 1, cue_law);
  ok &= run("mapping", 1, mapping);
  ok &= run("pid-dynamics", 5, pid_dynamics);
  ok &= run("raycast-oracle", 10, raycast);
  ok &= run("statistics-oracle", 60, statistics);
  ok &= run("confusion-matrix", 1, confusion);
  ok &= run("qualitative-pilots", 120, qualitative);
  ok &= run("record-replay", 120, record_replay);
  ok &= run("pulse-scheduler", 1, pulses);
  std::printf("%s\n", ok ? "ALL PASS" : "SOME CRITERIA FAILED");
  return ok ? 0 : 1;
}
