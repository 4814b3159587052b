#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hapticopter/world.hpp"

namespace hapticopter {

enum class Task { GateCourse, WallApproach, LateralGate, VerticalGate };

inline constexpr std::array<Task, 4> kTasks{Task::GateCourse, Task::WallApproach,
                                            Task::LateralGate, Task::VerticalGate};

constexpr std::string_view to_string(Task t) {
  switch (t) {
    case Task::GateCourse: return "GateCourse";
    case Task::WallApproach: return "WallApproach";
    case Task::LateralGate: return "LateralGate";
    case Task::VerticalGate: return "VerticalGate";
  }
  return "?";
}

// Accepts the enum spelling ("LateralGate") or the CLI spelling ("lateral-gate").
inline std::optional<Task> task_from_string(std::string_view s) {
  for (auto t : kTasks) {
    if (to_string(t) == s) return t;
  }
  if (s == "gate-course") return Task::GateCourse;
  if (s == "wall-approach") return Task::WallApproach;
  if (s == "lateral-gate") return Task::LateralGate;
  if (s == "vertical-gate") return Task::VerticalGate;
  return std::nullopt;
}

// Pass-through tasks end when the single gate is crossed through its opening.
constexpr bool is_pass_task(Task t) { return t == Task::LateralGate || t == Task::VerticalGate; }

inline constexpr double kDefaultDroneRadius = 0.10;

struct Scenario {
  Task task = Task::GateCourse;
  World world;
  Vec3 spawn;
  std::vector<int> gate_order;     // gate ids, in the order they must be crossed
  std::optional<int> target_wall;  // obstacle index for WallApproach

  const Aabb& wall() const { return world.obstacles().at(static_cast<std::size_t>(*target_wall)); }

  void validate(double radius = kDefaultDroneRadius) const {
    if (!world.room().strictly_contains(spawn)) throw ScenarioError("spawn lies outside the room");
    if (collision_check(spawn, radius, world))
      throw ScenarioError("spawn overlaps an obstacle or the room boundary");
    for (int id : gate_order)
      if (!world.find_gate(id))
        throw ScenarioError("gate_order references unknown gate " + std::to_string(id));
    if (task == Task::GateCourse && gate_order.empty())
      throw ScenarioError("gate course needs a gate order");
    if (is_pass_task(task) && gate_order.size() != 1)
      throw ScenarioError("pass-through tasks cross exactly one gate");
    if (task == Task::WallApproach) {
      if (!target_wall || *target_wall < 0 ||
          static_cast<std::size_t>(*target_wall) >= world.obstacles().size())
        throw ScenarioError("wall approach needs a valid target_wall");
      if (!(wall().min.x > spawn.x)) throw ScenarioError("target wall must lie ahead (+x) of spawn");
    }
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Optional overrides for the built-in layouts. Unset fields keep defaults.
struct ScenarioParams {
  std::optional<Vec3> spawn;
  double wall_distance = 4.0;   // WallApproach: spawn to wall face along +x
  double opening_width = 0.8;   // Lateral/VerticalGate: opening extent along x
  double opening_depth = 0.8;   // VerticalGate: opening extent along y
  double opening_center = 0.0;  // Lateral/VerticalGate: opening centre x
};

inline const Aabb kDefaultRoom{{-5.0, -5.0, 0.0}, {5.0, 5.0, 4.0}};

namespace detail {

// Four frame boxes around an opening inside a rectangular panel.
inline Gate make_panel_gate(int id, int axis, double plane, double thickness, Rect2 panel,
                            Rect2 opening) {
  const int ua = plane_u_axis(axis);
  const int va = plane_v_axis(axis);
  auto box = [&](double u0, double u1, double v0, double v1) {
    Aabb b;
    b.min[axis] = plane - 0.5 * thickness;
    b.max[axis] = plane + 0.5 * thickness;
    b.min[ua] = u0;
    b.max[ua] = u1;
    b.min[va] = v0;
    b.max[va] = v1;
    return b;
  };
  Gate g;
  g.id = id;
  g.axis = axis;
  g.plane = plane;
  g.opening = opening;
  if (!opening.valid()) throw ScenarioError("gate " + std::to_string(id) + ": degenerate opening");
  g.frame = {
      box(panel.u_min, opening.u_min, panel.v_min, panel.v_max),
      box(opening.u_max, panel.u_max, panel.v_min, panel.v_max),
      box(opening.u_min, opening.u_max, panel.v_min, opening.v_min),
      box(opening.u_min, opening.u_max, opening.v_max, panel.v_max),
  };
  return g;
}

inline Scenario gate_course(const ScenarioParams& p) {
  struct Layout {
    int axis;
    double plane;
    double panel_u;
    double open_u;
    double open_v;
  };
  // A counter-clockwise loop; openings alternate lateral and vertical offsets.
  constexpr std::array<Layout, 6> layouts{{
      {0, -1.5, -3.0, -2.7, 1.2},
      {0, 1.5, -3.0, -3.0, 1.7},
      {1, -1.0, 3.0, 3.3, 1.2},
      {1, 1.5, 3.0, 3.0, 0.9},
      {0, 0.0, 3.0, 2.7, 1.2},
      {1, 0.0, -3.0, -3.0, 1.7},
  }};
  std::vector<Gate> gates;
  for (int i = 0; i < 6; ++i) {
    const auto& s = layouts[static_cast<std::size_t>(i)];
    const Rect2 panel{s.panel_u - 1.0, 0.0, s.panel_u + 1.0, 2.4};
    const Rect2 opening{s.open_u - 0.5, s.open_v - 0.5, s.open_u + 0.5, s.open_v + 0.5};
    gates.push_back(make_panel_gate(i, s.axis, s.plane, 0.1, panel, opening));
  }
  Scenario sc;
  sc.task = Task::GateCourse;
  sc.world = World(kDefaultRoom, {}, std::move(gates));
  sc.spawn = p.spawn.value_or(Vec3{-3.0, -3.0, 1.0});
  sc.gate_order = {0, 1, 2, 3, 4, 5};
  return sc;
}

inline Scenario wall_approach(const ScenarioParams& p) {
  Scenario sc;
  sc.task = Task::WallApproach;
  sc.spawn = p.spawn.value_or(Vec3{-2.0, 0.0, 1.2});
  if (!(p.wall_distance > 0.0)) throw ScenarioError("wall distance must be positive");
  const double face = sc.spawn.x + p.wall_distance;
  const Aabb wall{{face, sc.spawn.y - 2.0, 0.0}, {face + 0.2, sc.spawn.y + 2.0, 2.4}};
  sc.world = World(kDefaultRoom, {wall}, {});
  sc.target_wall = 0;
  return sc;
}

inline Scenario lateral_gate(const ScenarioParams& p) {
  // Wall across the room at y = 0 with a vertical slot; a sill and a lintel
  // close the slot so the opening lies strictly inside the frame.
  const double half = 0.5 * p.opening_width;
  const Rect2 panel{kDefaultRoom.min.x, kDefaultRoom.min.z, kDefaultRoom.max.x, kDefaultRoom.max.z};
  const Rect2 opening{p.opening_center - half, 0.3, p.opening_center + half, 3.0};
  Scenario sc;
  sc.task = Task::LateralGate;
  sc.world = World(kDefaultRoom, {}, {make_panel_gate(0, 1, 0.0, 0.2, panel, opening)});
  sc.spawn = p.spawn.value_or(Vec3{-1.5, -2.5, 1.2});
  sc.gate_order = {0};
  return sc;
}

inline Scenario vertical_gate(const ScenarioParams& p) {
  const double hx = 0.5 * p.opening_width;
  const double hy = 0.5 * p.opening_depth;
  const Rect2 panel{kDefaultRoom.min.x, kDefaultRoom.min.y, kDefaultRoom.max.x, kDefaultRoom.max.y};
  const Rect2 opening{p.opening_center - hx, -hy, p.opening_center + hx, hy};
  Scenario sc;
  sc.task = Task::VerticalGate;
  sc.world = World(kDefaultRoom, {}, {make_panel_gate(0, 2, 2.05, 0.1, panel, opening)});
  sc.spawn = p.spawn.value_or(Vec3{-1.5, 0.0, 1.0});
  sc.gate_order = {0};
  return sc;
}

}  // namespace detail

inline Scenario build_scenario(Task task, const ScenarioParams& params = {}) {
  Scenario sc;
  switch (task) {
    case Task::GateCourse: sc = detail::gate_course(params); break;
    case Task::WallApproach: sc = detail::wall_approach(params); break;
    case Task::LateralGate: sc = detail::lateral_gate(params); break;
    case Task::VerticalGate: sc = detail::vertical_gate(params); break;
  }
  sc.validate();
  return sc;
}

// ---- JSON scenario files ----------------------------------------------------

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ScenarioError(where + ": unknown field '" + key + "'");
  }
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(where + ": missing field '" + key + "'");
  return *it;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ScenarioError(where + ": expected a number");
  return j.get<double>();
}

inline json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

inline Vec3 vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ScenarioError(where + ": expected [x, y, z]");
  return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

inline json box_to_json(const Aabb& b) { return {{"min", vec_to_json(b.min)}, {"max", vec_to_json(b.max)}}; }

inline Aabb box_from_json(const json& j, const std::string& where) {
  reject_unknown(j, {"min", "max"}, where);
  return {vec_from_json(field(j, "min", where), where + ".min"),
          vec_from_json(field(j, "max", where), where + ".max")};
}

constexpr std::array<const char*, 3> kAxisNames{"x", "y", "z"};

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& sc) {
  using detail::json;
  json obstacles = json::array();
  for (const auto& b : sc.world.obstacles()) obstacles.push_back(detail::box_to_json(b));
  json gates = json::array();
  for (const auto& g : sc.world.gates()) {
    json frame = json::array();
    for (const auto& b : g.frame) frame.push_back(detail::box_to_json(b));
    gates.push_back({{"id", g.id},
                     {"axis", detail::kAxisNames[static_cast<std::size_t>(g.axis)]},
                     {"plane", g.plane},
                     {"opening",
                      {{"min", {g.opening.u_min, g.opening.v_min}},
                       {"max", {g.opening.u_max, g.opening.v_max}}}},
                     {"frame", frame}});
  }
  return {{"task", std::string(to_string(sc.task))},
          {"room", detail::box_to_json(sc.world.room())},
          {"obstacles", obstacles},
          {"gates", gates},
          {"spawn", detail::vec_to_json(sc.spawn)},
          {"gate_order", sc.gate_order},
          {"target_wall", sc.target_wall ? json(*sc.target_wall) : json(nullptr)}};
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  using detail::json;
  detail::reject_unknown(
      j, {"task", "room", "obstacles", "gates", "spawn", "gate_order", "target_wall"}, "scenario");
  const auto& task_j = detail::field(j, "task", "scenario");
  if (!task_j.is_string()) throw ScenarioError("scenario.task: expected a string");
  auto task = task_from_string(task_j.get<std::string>());
  if (!task) throw ScenarioError("scenario.task: unknown task '" + task_j.get<std::string>() + "'");

  const Aabb room = detail::box_from_json(detail::field(j, "room", "scenario"), "scenario.room");
  std::vector<Aabb> obstacles;
  if (auto it = j.find("obstacles"); it != j.end()) {
    if (!it->is_array()) throw ScenarioError("scenario.obstacles: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      obstacles.push_back(
          detail::box_from_json((*it)[i], "scenario.obstacles[" + std::to_string(i) + "]"));
  }
  std::vector<Gate> gates;
  if (auto it = j.find("gates"); it != j.end()) {
    if (!it->is_array()) throw ScenarioError("scenario.gates: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "scenario.gates[" + std::to_string(i) + "]";
      const auto& gj = (*it)[i];
      detail::reject_unknown(gj, {"id", "axis", "plane", "opening", "frame"}, where);
      Gate g;
      const auto& id = detail::field(gj, "id", where);
      if (!id.is_number_integer()) throw ScenarioError(where + ".id: expected an integer");
      g.id = id.get<int>();
      const auto& axis = detail::field(gj, "axis", where);
      g.axis = -1;
      for (int a = 0; a < 3; ++a)
        if (axis.is_string() && axis.get<std::string>() == detail::kAxisNames[static_cast<std::size_t>(a)])
          g.axis = a;
      if (g.axis < 0) throw ScenarioError(where + ".axis: expected \"x\", \"y\" or \"z\"");
      g.plane = detail::number(detail::field(gj, "plane", where), where + ".plane");
      const auto& oj = detail::field(gj, "opening", where);
      detail::reject_unknown(oj, {"min", "max"}, where + ".opening");
      const auto& omin = detail::field(oj, "min", where + ".opening");
      const auto& omax = detail::field(oj, "max", where + ".opening");
      if (!omin.is_array() || omin.size() != 2 || !omax.is_array() || omax.size() != 2)
        throw ScenarioError(where + ".opening: expected [u, v] corners");
      g.opening = {detail::number(omin[0], where), detail::number(omin[1], where),
                   detail::number(omax[0], where), detail::number(omax[1], where)};
      const auto& fj = detail::field(gj, "frame", where);
      if (!fj.is_array()) throw ScenarioError(where + ".frame: expected an array");
      for (std::size_t k = 0; k < fj.size(); ++k)
        g.frame.push_back(detail::box_from_json(fj[k], where + ".frame[" + std::to_string(k) + "]"));
      gates.push_back(std::move(g));
    }
  }

  Scenario sc;
  sc.task = *task;
  sc.world = World(room, std::move(obstacles), std::move(gates));
  sc.spawn = detail::vec_from_json(detail::field(j, "spawn", "scenario"), "scenario.spawn");
  if (auto it = j.find("gate_order"); it != j.end()) {
    if (!it->is_array()) throw ScenarioError("scenario.gate_order: expected an array");
    for (const auto& v : *it) {
      if (!v.is_number_integer()) throw ScenarioError("scenario.gate_order: expected integers");
      sc.gate_order.push_back(v.get<int>());
    }
  }
  if (auto it = j.find("target_wall"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw ScenarioError("scenario.target_wall: expected an integer");
    sc.target_wall = it->get<int>();
  }
  sc.validate();
  return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("scenario file " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

// A built-in task name ("wall-approach", "LateralGate", ...) or a JSON file path.
inline Scenario resolve_scenario(const std::string& name_or_path) {
  if (auto t = task_from_string(name_or_path)) return build_scenario(*t);
  return load_scenario_file(name_or_path);
}

}  // namespace hapticopter
