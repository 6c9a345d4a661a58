#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mhpp/exploresim.hpp"

namespace mhpp::explore {

using nlohmann::json;

namespace {

Terrain terrain_named(const std::string& name) {
  for (int t = 0; t < kTerrainCount; ++t)
    if (terrain_name(static_cast<Terrain>(t)) == name) return static_cast<Terrain>(t);
  throw std::invalid_argument("unknown terrain '" + name + "'");
}

Cell cell_of(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

ExploreScenario scenario_from_json(const std::string& text, const std::string& base_dir) {
  const json doc = json::parse(text);
  const auto map_path = doc.at("map").get<std::string>();
  std::filesystem::path resolved(map_path);
  if (resolved.is_relative() && !base_dir.empty()) resolved = std::filesystem::path(base_dir) / resolved;
  ExploreScenario sc{load_map_file(resolved.string()), map_path, {}, {}, {}};

  if (doc.contains("classes")) {
    for (const auto& jc : doc.at("classes")) {
      TerrainSet passable;
      for (const auto& t : jc.at("passable")) passable.insert(terrain_named(t.get<std::string>()));
      sc.classes.emplace_back(jc.at("name").get<std::string>(), passable, jc.value("priority", 0));
    }
  } else {
    sc.classes = {ground_vehicle_class(), aerial_vehicle_class()};
  }

  for (const auto& jr : doc.at("robots")) {
    RobotConfig rc;
    const auto name = jr.at("class").get<std::string>();
    rc.class_index = sc.classes.size();
    for (std::size_t k = 0; k < sc.classes.size(); ++k)
      if (sc.classes[k].name == name) rc.class_index = k;
    if (rc.class_index == sc.classes.size()) throw std::invalid_argument("unknown robot class '" + name + "'");
    rc.start = cell_of(jr.at("start"));
    if (jr.contains("priority")) rc.priority = jr.at("priority").get<int>();
    sc.robots.push_back(rc);
  }

  auto& p = sc.params;
  const json params = doc.value("params", json::object());
  p.sense_radius = params.value("sense_radius", p.sense_radius);
  p.window_radius = params.value("window_radius", p.window_radius);
  p.cluster_radius = params.value("cluster_radius", p.cluster_radius);
  p.alpha = params.value("alpha", p.alpha);
  if (params.contains("c0")) p.c0 = params.at("c0").get<Cost>();
  p.replan_period = params.value("replan_period", p.replan_period);
  p.tick_cap = params.value("tick_cap", p.tick_cap);
  p.priority_assignment = params.value("priority_assignment", p.priority_assignment);
  p.hetero_cost = params.value("hetero_cost", p.hetero_cost);
  p.peaf_expansions = params.value("peaf_expansions", p.peaf_expansions);
  p.start_jitter = params.value("start_jitter", p.start_jitter);
  p.seed = params.value("seed", p.seed);
  return sc;
}

ExploreScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::string metrics_to_json(const EpisodeMetrics& m) {
  json doc;
  doc["ticks"] = m.ticks;
  doc["complete"] = m.complete;
  doc["robot_distance"] = m.robot_distance;
  doc["total_distance"] = m.total_distance;
  doc["coverage"] = m.coverage;
  doc["unreachable_frontiers"] = m.unreachable_frontiers;
  doc["global_replans"] = m.global_replans;
  return doc.dump(2) + "\n";
}

EpisodeMetrics metrics_from_json(const std::string& text) {
  const json doc = json::parse(text);
  EpisodeMetrics m;
  m.ticks = doc.at("ticks").get<std::size_t>();
  m.complete = doc.at("complete").get<bool>();
  m.robot_distance = doc.at("robot_distance").get<std::vector<Cost>>();
  m.total_distance = doc.at("total_distance").get<Cost>();
  m.coverage = doc.at("coverage").get<std::vector<double>>();
  m.unreachable_frontiers = doc.at("unreachable_frontiers").get<std::size_t>();
  m.global_replans = doc.at("global_replans").get<std::size_t>();
  return m;
}

std::string trace_to_csv(const EpisodeMetrics& m) {
  std::ostringstream out;
  out << "tick,robot,x,y,known_cells\n";
  for (const auto& r : m.trace)
    out << r.tick << ',' << r.robot << ',' << r.cell.x << ',' << r.cell.y << ',' << r.known_cells << '\n';
  return out.str();
}

}  // namespace mhpp::explore
