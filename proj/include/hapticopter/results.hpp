#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hapticopter/harness.hpp"
#include "hapticopter/stats.hpp"

namespace hapticopter {

inline constexpr const char* kResultsHeader =
    "trial,task,policy,seed,completed,time_s,distance_m,collisions,min_wall_dist_m,cross_x,cross_y,"
    "cross_z";

// One CSV row. Missing numeric values are NaN and written as empty fields.
struct ResultRow {
  int trial = 0;
  std::string task;
  std::string policy;
  std::uint64_t seed = 0;
  bool completed = false;
  double time_s = std::numeric_limits<double>::quiet_NaN();
  double distance_m = std::numeric_limits<double>::quiet_NaN();
  double collisions = std::numeric_limits<double>::quiet_NaN();
  double min_wall_dist_m = std::numeric_limits<double>::quiet_NaN();
  double cross_x = std::numeric_limits<double>::quiet_NaN();
  double cross_y = std::numeric_limits<double>::quiet_NaN();
  double cross_z = std::numeric_limits<double>::quiet_NaN();

  double metric(const std::string& name) const {
    if (name == "time_s") return time_s;
    if (name == "distance_m") return distance_m;
    if (name == "collisions") return collisions;
    if (name == "min_wall_dist_m") return min_wall_dist_m;
    if (name == "cross_x") return cross_x;
    if (name == "cross_y") return cross_y;
    if (name == "cross_z") return cross_z;
    if (name == "completed") return completed ? 1.0 : 0.0;
    throw DomainError("unknown metric column: " + name);
  }

  std::string key(const std::string& column) const {
    if (column == "task") return task;
    if (column == "policy") return policy;
    if (column == "completed") return completed ? "1" : "0";
    if (column == "trial") return std::to_string(trial);
    throw DomainError("cannot group by column: " + column);
  }
};

inline ResultRow to_result_row(const ExperimentRow& row) {
  ResultRow r;
  r.trial = row.trial;
  r.task = std::string(to_string(row.task));
  r.policy = std::string(to_string(row.policy));
  r.seed = row.seed;
  if (!row.metrics) return r;
  const auto& m = *row.metrics;
  r.completed = m.completed;
  r.time_s = m.completion_time;
  r.distance_m = m.path_length;
  r.collisions = m.collisions;
  r.min_wall_dist_m = m.min_wall_distance;
  if (!m.crossing_points.empty()) {
    // The last crossing is the one that finished a pass task.
    const Vec3& p = m.crossing_points.back();
    r.cross_x = p.x;
    r.cross_y = p.y;
    r.cross_z = p.z;
  }
  return r;
}

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_number(const std::string& s, std::size_t line) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size())
    throw DomainError("results line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.trial << ',' << r.task << ',' << r.policy << ',' << r.seed << ','
        << (r.completed ? 1 : 0) << ',' << detail::format_number(r.time_s) << ','
        << detail::format_number(r.distance_m) << ',' << detail::format_number(r.collisions) << ','
        << detail::format_number(r.min_wall_dist_m) << ',' << detail::format_number(r.cross_x)
        << ',' << detail::format_number(r.cross_y) << ',' << detail::format_number(r.cross_z)
        << '\n';
  }
}

inline std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader)
    throw DomainError("results table: missing or unexpected header");
  std::vector<ResultRow> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 12)
      throw DomainError("results line " + std::to_string(n) + ": expected 12 fields");
    ResultRow r;
    r.trial = static_cast<int>(detail::parse_number(f[0], n));
    r.task = f[1];
    r.policy = f[2];
    try {
      r.seed = std::stoull(f[3]);
    } catch (const std::exception&) {
      throw DomainError("results line " + std::to_string(n) + ": bad seed");
    }
    r.completed = f[4] == "1";
    r.time_s = detail::parse_number(f[5], n);
    r.distance_m = detail::parse_number(f[6], n);
    r.collisions = detail::parse_number(f[7], n);
    r.min_wall_dist_m = detail::parse_number(f[8], n);
    r.cross_x = detail::parse_number(f[9], n);
    r.cross_y = detail::parse_number(f[10], n);
    r.cross_z = detail::parse_number(f[11], n);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<ResultRow> load_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open results table " + path);
  return read_results_csv(in);
}

// Groups the non-missing values of `metric` by the value of `group_by`,
// groups ordered by key.
inline std::map<std::string, std::vector<double>> group_metric(const std::vector<ResultRow>& rows,
                                                               const std::string& metric,
                                                               const std::string& group_by) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& r : rows) {
    const double v = r.metric(metric);
    if (!std::isnan(v)) out[r.key(group_by)].push_back(v);
  }
  return out;
}

}  // namespace hapticopter
