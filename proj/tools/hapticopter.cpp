// Command-line front end: batch runs, comparisons, statistics, the live
// gateway, record replay, pulse schedules and scenario dumps.

#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "hapticopter/gateway/server.hpp"
#include "hapticopter/hapticopter.hpp"

using namespace hapticopter;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& scenario, const std::string& policy, int reps, std::uint64_t seed,
            const std::string& out_dir, bool strict, double sigma, unsigned threads, double limit) {
  const auto kind = pilot_kind_from_string(policy);
  if (!kind) throw DomainError("unknown policy: " + policy);
  ExperimentConfig cfg;
  cfg.scenario = resolve_scenario(scenario);
  cfg.policy.kind = *kind;
  cfg.policy.seed = seed;
  cfg.policy.depth_sigma = sigma;
  cfg.repetitions = reps;
  cfg.duration_limit = limit;

  const auto rows = run_experiment({cfg}, threads);
  std::vector<ResultRow> table;
  bool timeout = false;
  for (const auto& r : rows) {
    if (!r.error.empty()) throw DomainError("trial " + std::to_string(r.trial) + ": " + r.error);
    timeout = timeout || r.result->reason == TrialOutcome::Timeout;
    table.push_back(to_result_row(r));
  }
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / "results.csv";
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write " + path.string());
  write_results_csv(out, table);
  std::cerr << "wrote " << table.size() << " rows to " << path.string() << "\n";
  return strict && timeout ? 2 : 0;
}

json test_json(const std::string& test, const RankTestResult& r) {
  json dof = test == "kruskal" ? json(r.dof1) : json::array({r.dof1, r.dof2});
  return {{"test", test},
          {"statistic", std::isfinite(r.statistic) ? json(r.statistic) : json("inf")},
          {"dof", dof},
          {"p", r.p_value}};
}

RankTestResult apply_test(const std::string& test, const Groups& g) {
  if (test == "kruskal") return kruskal_wallis(g);
  if (test == "levene") return levene(g);
  if (test == "levene-median") return levene(g, LeveneCenter::Median);
  throw DomainError("unknown test: " + test);
}

int cmd_stats(const std::string& csv, const std::string& metric, const std::string& group_by,
              const std::string& test) {
  const auto groups = group_metric(load_results_csv(csv), metric, group_by);
  Groups g;
  for (const auto& [name, values] : groups) g.push_back(values);
  std::cout << test_json(test, apply_test(test, g)).dump(2) << "\n";
  return 0;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

int cmd_compare(const std::string& baseline, const std::string& treatment) {
  const auto base = load_results_csv(baseline);
  const auto treat = load_results_csv(treatment);
  std::set<std::string> tasks;
  for (const auto& r : base) tasks.insert(r.task);
  json report = json::array();
  for (const auto& task : tasks) {
    for (const char* metric : {"time_s", "distance_m", "collisions", "min_wall_dist_m", "cross_x"}) {
      std::vector<double> a, b;
      for (const auto& r : base)
        if (r.task == task && !std::isnan(r.metric(metric))) a.push_back(r.metric(metric));
      for (const auto& r : treat)
        if (r.task == task && !std::isnan(r.metric(metric))) b.push_back(r.metric(metric));
      if (a.empty() || b.empty() || a.size() + b.size() < 3) continue;
      json row{{"task", task},
               {"metric", metric},
               {"n", {a.size(), b.size()}},
               {"mean", {mean(a), mean(b)}},
               {"kruskal", test_json("kruskal", kruskal_wallis({a, b}))}};
      if (a.size() > 1 && b.size() > 1) row["levene"] = test_json("levene", levene({a, b}));
      report.push_back(row);
    }
  }
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_serve(unsigned short port, const std::string& scenario, const std::string& log_dir) {
  namespace net = boost::asio;
  gateway::ServerOptions opts;
  opts.scenario = resolve_scenario(scenario);
  opts.log_dir = log_dir;
  net::io_context io;
  gateway::Server server(io, {net::ip::make_address("0.0.0.0"), port}, opts);
  server.start();
  net::signal_set signals(io, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code&, int) {
    server.stop();
    io.stop();
  });
  std::cerr << "listening on ws://0.0.0.0:" << server.port() << "/session\n";
  io.run();
  return 0;
}

int cmd_replay(const std::string& record_path, const std::string& out) {
  const auto rec = gateway::load_record(record_path);
  const auto core = gateway::replay_core(rec);
  const auto m = core.metrics();
  ExperimentRow row;
  row.task = core.loop().scenario().task;
  row.seed = rec.seed;
  row.metrics = m;
  ResultRow r = to_result_row(row);
  r.policy = "live";
  std::ofstream f(out);
  if (!f) throw DomainError("cannot write " + out);
  write_results_csv(f, {r});
  return 0;
}

int cmd_pulses(std::uint64_t seed, int n) {
  std::cout << "index,onset_s,direction,duration_s\n";
  const auto sched = pulse_schedule(seed, n);
  for (std::size_t i = 0; i < sched.size(); ++i)
    std::cout << i << "," << detail::format_number(sched[i].onset) << "," << to_string(sched[i].direction) << ","
              << detail::format_number(sched[i].duration) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hapticopter: haptic teleoperation simulator and experiment harness"};
  app.require_subcommand(1);
  int code = 0;

  std::string scenario = "gate-course", policy = "haptic-reactive", out_dir = ".";
  int reps = 20;
  std::uint64_t seed = 0;
  bool strict = false;
  double sigma = 0.3, limit = 40.0;
  unsigned threads = 0;
  auto* run = app.add_subcommand("run", "run synthetic-pilot trials and write results.csv");
  run->add_option("--scenario", scenario, "builtin name or scenario JSON file");
  run->add_option("--policy", policy, "waypoint | noisy-depth | haptic-reactive");
  run->add_option("--reps", reps, "trials")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "base seed");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--sigma", sigma, "depth-noise standard deviation, m");
  run->add_option("--limit", limit, "per-trial duration limit, s");
  run->add_option("--threads", threads, "worker threads (0: hardware)");
  run->add_flag("--strict", strict, "exit 2 when any trial times out");
  run->callback([&] { code = cmd_run(scenario, policy, reps, seed, out_dir, strict, sigma, threads, limit); });

  std::string baseline, treatment;
  auto* compare = app.add_subcommand("compare", "compare two results tables per task");
  compare->add_option("--baseline", baseline)->required();
  compare->add_option("--treatment", treatment)->required();
  compare->callback([&] { code = cmd_compare(baseline, treatment); });

  std::string csv, metric = "time_s", group_by = "policy", test = "kruskal";
  auto* stats = app.add_subcommand("stats", "k-sample test on one results column");
  stats->add_option("csv", csv)->required();
  stats->add_option("--metric", metric);
  stats->add_option("--group-by", group_by);
  stats->add_option("--test", test, "kruskal | levene | levene-median");
  stats->callback([&] { code = cmd_stats(csv, metric, group_by, test); });

  unsigned short port = 8765;
  std::string log_dir;
  auto* serve = app.add_subcommand("serve", "WebSocket gateway on /session");
  serve->add_option("--port", port);
  serve->add_option("--scenario", scenario);
  serve->add_option("--log-dir", log_dir, "session records (default $HAPTICOPTER_LOG_DIR or .)");
  serve->callback([&] { code = cmd_serve(port, scenario, log_dir); });

  std::string record, out_csv = "replay.csv";
  auto* replay = app.add_subcommand("replay", "replay a session record into a results row");
  replay->add_option("record", record)->required();
  replay->add_option("--out", out_csv);
  replay->callback([&] { code = cmd_replay(record, out_csv); });

  int n_pulses = 60;
  auto* pulses = app.add_subcommand("pulses", "print a cue-recognition pulse schedule");
  pulses->add_option("--seed", seed);
  pulses->add_option("-n,--trials", n_pulses)->check(CLI::PositiveNumber);
  pulses->callback([&] { code = cmd_pulses(seed, n_pulses); });

  auto* dump = app.add_subcommand("scenario", "print a scenario as JSON");
  std::string which = "gate-course";
  dump->add_option("name", which, "builtin name or file");
  dump->callback([&] { std::cout << scenario_to_json(resolve_scenario(which)).dump(2) << "\n"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
