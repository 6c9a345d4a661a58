#include "mhpp/instance.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "mhpp/rng.hpp"

namespace mhpp {

MhppInstance::MhppInstance(std::size_t num_targets, std::vector<std::size_t> agent_class,
                           std::vector<AgentSet> assign, std::vector<CostMatrix> class_costs)
    : num_targets_(num_targets),
      agent_class_(std::move(agent_class)),
      assign_(std::move(assign)),
      class_costs_(std::move(class_costs)) {
  if (agent_class_.empty()) throw std::invalid_argument("instance needs at least one agent");
  if (agent_class_.size() > kMaxAgents) throw std::invalid_argument("too many agents");
  if (assign_.size() != num_targets_)
    throw std::invalid_argument("assignment sets must match the target count");
  const std::size_t n = num_locations();
  for (const auto& m : class_costs_) {
    if (m.size() != n) throw std::invalid_argument("cost matrix size must be N + 2 Na");
    if (!m.symmetric()) throw std::invalid_argument("cost matrices must be symmetric");
  }
  for (std::size_t k : agent_class_)
    if (k >= class_costs_.size()) throw std::invalid_argument("agent class index out of range");
  const AgentSet everyone = all_agents();
  for (std::size_t v = 0; v < num_targets_; ++v) {
    if (assign_[v].empty())
      throw std::invalid_argument("target " + std::to_string(v) + " has no capable agent");
    if ((assign_[v].bits() & ~everyone.bits()) != 0)
      throw std::invalid_argument("assignment set names an unknown agent");
  }
  min_costs_ = CostMatrix(n);
  for (LocationId u = 0; u < n; ++u)
    for (LocationId v = 0; v < n; ++v) {
      Cost best = kInfiniteCost;
      for (AgentId a = 0; a < num_agents(); ++a) best = std::min(best, cost(a, u, v));
      min_costs_(u, v) = best;
    }
}

MhppInstance MhppInstance::from_grid(const TerrainGrid& grid, std::vector<AgentClass> classes,
                                     std::vector<Cell> node_cells, std::vector<AgentSet> assign,
                                     std::vector<AgentSpec> agents, std::string map_path,
                                     std::uint64_t seed) {
  // Location cells; starts and goals may repeat a cell, so deduplicate first.
  std::vector<Cell> location_cells = node_cells;
  for (const auto& a : agents) location_cells.push_back(a.start);
  for (const auto& a : agents) location_cells.push_back(a.goal);

  std::vector<Cell> unique_cells;
  std::vector<std::size_t> slot(location_cells.size());
  for (std::size_t i = 0; i < location_cells.size(); ++i) {
    auto it = std::find(unique_cells.begin(), unique_cells.end(), location_cells[i]);
    if (it == unique_cells.end()) {
      slot[i] = unique_cells.size();
      unique_cells.push_back(location_cells[i]);
    } else {
      if (i < node_cells.size())
        throw std::invalid_argument("target nodes must occupy distinct cells");
      slot[i] = static_cast<std::size_t>(it - unique_cells.begin());
    }
  }
  const auto unique_costs = build_cost_matrices(grid, unique_cells, classes);
  std::vector<CostMatrix> costs;
  for (const auto& um : unique_costs) {
    CostMatrix m(location_cells.size());
    for (std::size_t u = 0; u < location_cells.size(); ++u)
      for (std::size_t v = 0; v < location_cells.size(); ++v) m(u, v) = um(slot[u], slot[v]);
    costs.push_back(std::move(m));
  }
  std::vector<std::size_t> agent_class;
  for (const auto& a : agents) {
    if (a.class_index >= classes.size()) throw std::invalid_argument("agent class out of range");
    agent_class.push_back(a.class_index);
  }
  MhppInstance inst(node_cells.size(), std::move(agent_class), std::move(assign), std::move(costs));
  inst.origin_ = InstanceOrigin{std::move(map_path), seed, std::move(classes), std::move(node_cells),
                                std::move(agents)};
  return inst;
}

Cost path_cost(const MhppInstance& inst, AgentId a, const std::vector<LocationId>& path) {
  Cost total = 0;
  for (std::size_t k = 1; k < path.size(); ++k)
    total = add_cost(total, inst.cost(a, path[k - 1], path[k]));
  return total;
}

void evaluate(const MhppInstance& inst, Solution& sol) {
  sol.makespan = 0;
  sol.total = 0;
  for (AgentId a = 0; a < sol.paths.size(); ++a) {
    const Cost c = path_cost(inst, a, sol.paths[a]);
    sol.makespan = std::max(sol.makespan, c);
    sol.total = add_cost(sol.total, c);
  }
}

Solution empty_solution(const MhppInstance& inst) {
  Solution sol;
  for (AgentId a = 0; a < inst.num_agents(); ++a)
    sol.paths.push_back({inst.start_location(a), inst.goal_location(a)});
  evaluate(inst, sol);
  return sol;
}

std::string_view violation_name(Violation v) noexcept {
  switch (v) {
    case Violation::AgentCount: return "agent count mismatch";
    case Violation::Endpoint: return "endpoint violated";
    case Violation::UnknownLocation: return "unknown location";
    case Violation::NodeRepeated: return "node repeated";
    case Violation::NodeUnvisited: return "node unvisited";
    case Violation::AssignmentViolated: return "assignment violated";
    case Violation::InfiniteCost: return "infinite cost";
  }
  return "unknown violation";
}

ValidationResult validate_solution(const MhppInstance& inst, const Solution& sol) {
  ValidationResult r;
  auto fail = [&](Violation v, const std::string& detail) {
    r.violation = v;
    r.message = std::string(violation_name(v)) + ": " + detail;
    return r;
  };
  if (sol.paths.size() != inst.num_agents())
    return fail(Violation::AgentCount, "expected " + std::to_string(inst.num_agents()) +
                                           " paths, got " + std::to_string(sol.paths.size()));
  std::vector<int> seen(inst.num_targets(), -1);
  for (AgentId a = 0; a < sol.paths.size(); ++a) {
    const auto& p = sol.paths[a];
    if (p.size() < 2 || p.front() != inst.start_location(a) || p.back() != inst.goal_location(a))
      return fail(Violation::Endpoint, "agent " + std::to_string(a));
    for (std::size_t k = 1; k + 1 < p.size(); ++k) {
      const LocationId v = p[k];
      if (!inst.is_target(v))
        return fail(Violation::UnknownLocation,
                    "agent " + std::to_string(a) + " visits location " + std::to_string(v));
      if (seen[v] >= 0)
        return fail(Violation::NodeRepeated, "node " + std::to_string(v) + " (agents " +
                                                 std::to_string(seen[v]) + ", " +
                                                 std::to_string(a) + ")");
      seen[v] = static_cast<int>(a);
      if (!inst.can_serve(a, v))
        return fail(Violation::AssignmentViolated,
                    "node " + std::to_string(v) + " on agent " + std::to_string(a));
    }
  }
  for (std::size_t v = 0; v < seen.size(); ++v)
    if (seen[v] < 0) return fail(Violation::NodeUnvisited, "node " + std::to_string(v));
  r.makespan = 0;
  r.total = 0;
  for (AgentId a = 0; a < sol.paths.size(); ++a) {
    const Cost c = path_cost(inst, a, sol.paths[a]);
    if (c == kInfiniteCost) return fail(Violation::InfiniteCost, "agent " + std::to_string(a));
    r.makespan = std::max(r.makespan, c);
    r.total = add_cost(r.total, c);
  }
  return r;
}

FleetSpec gv_av_fleet(std::size_t gv, std::size_t av) {
  return FleetSpec{{ground_vehicle_class(), aerial_vehicle_class()}, {gv, av}};
}

std::size_t normal_node_count(std::size_t n_nodes) noexcept { return (2 * n_nodes + 2) / 3; }

namespace {

std::size_t passable_kinds(const AgentClass& k) {
  std::size_t n = 0;
  for (int t = 0; t < kTerrainCount; ++t) n += k.passable.contains(static_cast<Terrain>(t));
  return n;
}

// Component labels under 8-connectivity with the corner rule; -1 for blocked cells.
std::vector<int> components(const TerrainGrid& grid, const AgentClass& k, std::vector<std::size_t>& sizes) {
  std::vector<int> label(grid.size(), -1);
  sizes.clear();
  const auto& cells = grid.cells();
  auto passable = [&](std::size_t i) { return k.passable.contains(cells[i]); };
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < grid.size(); ++s) {
    if (label[s] >= 0 || !passable(s)) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    label[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ++count;
      const Cell c = grid.cell_at(cur);
      for (const auto& m : kGridMoves) {
        const Cell n{c.x + m.dx, c.y + m.dy};
        if (!grid.in_bounds(n)) continue;
        const std::size_t ni = grid.index(n);
        if (label[ni] >= 0 || !passable(ni)) continue;
        if (m.dx != 0 && m.dy != 0 &&
            (!passable(grid.index({n.x, c.y})) || !passable(grid.index({c.x, n.y}))))
          continue;
        label[ni] = id;
        stack.push_back(ni);
      }
    }
    sizes.push_back(count);
  }
  return label;
}

}  // namespace

MhppInstance generate_random_instance(const TerrainGrid& grid, std::size_t n_nodes,
                                      const FleetSpec& fleet, std::uint64_t seed,
                                      const GenerationOptions& opts, std::string map_path) {
  if (fleet.classes.empty() || fleet.classes.size() != fleet.counts.size())
    throw GenerationError("fleet must list one count per class");
  std::size_t n_agents = 0;
  for (auto c : fleet.counts) n_agents += c;
  if (n_agents == 0) throw GenerationError("fleet has no agents");
  if (n_agents > kMaxAgents) throw GenerationError("fleet exceeds the agent limit");

  std::size_t weakest = 0;
  std::size_t strongest = 0;
  for (std::size_t k = 0; k < fleet.classes.size(); ++k) {
    if (passable_kinds(fleet.classes[k]) < passable_kinds(fleet.classes[weakest])) weakest = k;
    if (passable_kinds(fleet.classes[k]) > passable_kinds(fleet.classes[strongest])) strongest = k;
  }
  if (!fleet.classes[weakest].passable.contains(Terrain::Ground))
    throw GenerationError("the least capable class cannot drive on ground");

  // Anchor region: the weakest class's largest component. Hetero nodes come
  // from the strongest class's component that contains it.
  std::vector<std::size_t> weak_sizes;
  std::vector<std::size_t> strong_sizes;
  const auto weak_label = components(grid, fleet.classes[weakest], weak_sizes);
  const auto strong_label = components(grid, fleet.classes[strongest], strong_sizes);
  if (weak_sizes.empty()) throw GenerationError("map has no cell passable for every class");
  const int anchor = static_cast<int>(
      std::max_element(weak_sizes.begin(), weak_sizes.end()) - weak_sizes.begin());

  std::vector<Cell> ground;
  std::vector<Cell> hetero;
  int region = -1;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (weak_label[i] == anchor) {
      region = strong_label[i];
      break;
    }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Terrain t = grid.cells()[i];
    if (weak_label[i] == anchor && t == Terrain::Ground) ground.push_back(grid.cell_at(i));
    if (strong_label[i] == region && (t == Terrain::Swamp || t == Terrain::Water))
      hetero.push_back(grid.cell_at(i));
  }

  const std::size_t n_normal = normal_node_count(n_nodes);
  const std::size_t n_hetero = n_nodes - n_normal;
  const std::size_t n_terminals = opts.return_to_start ? n_agents : 2 * n_agents;
  if (ground.size() < n_normal + n_terminals)
    throw GenerationError("not enough reachable ground cells for " + std::to_string(n_normal) +
                          " normal nodes and " + std::to_string(n_terminals) + " terminals");
  if (hetero.size() < n_hetero)
    throw GenerationError("not enough reachable swamp/water cells for " + std::to_string(n_hetero) +
                          " agent-restricted nodes");

  std::vector<std::size_t> agent_class;
  for (std::size_t k = 0; k < fleet.counts.size(); ++k)
    for (std::size_t c = 0; c < fleet.counts[k]; ++c) agent_class.push_back(k);

  auto capable_for = [&](Terrain t) {
    AgentSet s;
    for (AgentId a = 0; a < n_agents; ++a)
      if (fleet.classes[agent_class[a]].passable.contains(t)) s.insert(a);
    return s;
  };

  Rng rng(seed);
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    rng.partial_shuffle(ground, n_normal + n_terminals);
    rng.partial_shuffle(hetero, n_hetero);

    std::vector<Cell> nodes(ground.begin(), ground.begin() + static_cast<std::ptrdiff_t>(n_normal));
    nodes.insert(nodes.end(), hetero.begin(), hetero.begin() + static_cast<std::ptrdiff_t>(n_hetero));
    std::vector<AgentSet> assign;
    for (const auto& c : nodes) assign.push_back(capable_for(grid.at(c)));

    std::vector<AgentSpec> agents;
    for (AgentId a = 0; a < n_agents; ++a) {
      const Cell start = ground[n_normal + a];
      const Cell goal = opts.return_to_start ? start : ground[n_normal + n_agents + a];
      agents.push_back({agent_class[a], start, goal});
    }

    auto inst = MhppInstance::from_grid(grid, fleet.classes, nodes, assign, agents, map_path, seed);
    bool reachable = true;
    for (LocationId v = 0; v < inst.num_targets() && reachable; ++v)
      for (AgentId a = 0; a < n_agents && reachable; ++a)
        if (inst.can_serve(a, v) && (inst.cost(a, inst.start_location(a), v) == kInfiniteCost ||
                                     inst.cost(a, v, inst.goal_location(a)) == kInfiniteCost))
          reachable = false;
    if (reachable) return inst;
  }
  throw GenerationError("could not sample a mutually reachable node set");
}

// ---------------------------------------------------------------------------
// JSON documents

using nlohmann::json;

namespace {

json terrain_list(TerrainSet s) {
  json out = json::array();
  for (int t = 0; t < kTerrainCount; ++t)
    if (s.contains(static_cast<Terrain>(t))) out.push_back(terrain_name(static_cast<Terrain>(t)));
  return out;
}

Terrain terrain_from_name(const std::string& name) {
  for (int t = 0; t < kTerrainCount; ++t)
    if (terrain_name(static_cast<Terrain>(t)) == name) return static_cast<Terrain>(t);
  throw std::invalid_argument("unknown terrain '" + name + "'");
}

}  // namespace

std::string instance_to_json(const MhppInstance& inst) {
  if (!inst.origin()) throw std::invalid_argument("only grid-backed instances serialize");
  const auto& o = *inst.origin();
  json doc;
  doc["map"] = o.map_path;
  doc["seed"] = o.seed;
  doc["classes"] = json::array();
  for (const auto& k : o.classes)
    doc["classes"].push_back(
        {{"name", k.name}, {"passable", terrain_list(k.passable)}, {"priority", k.priority}});
  doc["nodes"] = json::array();
  for (LocationId v = 0; v < inst.num_targets(); ++v) {
    json capable = json::array();
    for (std::size_t k = 0; k < o.classes.size(); ++k) {
      bool any = false;
      bool all = true;
      for (AgentId a = 0; a < inst.num_agents(); ++a) {
        if (inst.agent_class(a) != k) continue;
        any = true;
        all = all && inst.can_serve(a, v);
      }
      bool none = true;
      for (AgentId a = 0; a < inst.num_agents(); ++a)
        if (inst.agent_class(a) == k && inst.can_serve(a, v)) none = false;
      if (any && !all && !none)
        throw std::invalid_argument("assignment sets are not class-aligned; cannot serialize");
      if (any && all) capable.push_back(o.classes[k].name);
    }
    doc["nodes"].push_back(
        {{"id", v}, {"x", o.node_cells[v].x}, {"y", o.node_cells[v].y}, {"capable", capable}});
  }
  doc["agents"] = json::array();
  for (AgentId a = 0; a < inst.num_agents(); ++a) {
    const auto& spec = o.agents[a];
    doc["agents"].push_back({{"id", a},
                             {"class", o.classes[spec.class_index].name},
                             {"start", {spec.start.x, spec.start.y}},
                             {"goal", {spec.goal.x, spec.goal.y}}});
  }
  return doc.dump(2) + "\n";
}

MhppInstance instance_from_json(const std::string& text, const std::string& base_dir) {
  const json doc = json::parse(text);
  std::vector<AgentClass> classes;
  if (doc.contains("classes")) {
    for (const auto& jc : doc.at("classes")) {
      TerrainSet passable;
      for (const auto& t : jc.at("passable")) passable.insert(terrain_from_name(t.get<std::string>()));
      classes.emplace_back(jc.at("name").get<std::string>(), passable, jc.value("priority", 0));
    }
  } else {
    classes = {ground_vehicle_class(), aerial_vehicle_class()};
  }
  auto class_index = [&](const std::string& name) {
    for (std::size_t k = 0; k < classes.size(); ++k)
      if (classes[k].name == name) return k;
    throw std::invalid_argument("unknown agent class '" + name + "'");
  };

  std::vector<AgentSpec> agents;
  for (const auto& ja : doc.at("agents")) {
    const auto& s = ja.at("start");
    const auto& g = ja.at("goal");
    agents.push_back({class_index(ja.at("class").get<std::string>()),
                      {s.at(0).get<int>(), s.at(1).get<int>()},
                      {g.at(0).get<int>(), g.at(1).get<int>()}});
  }
  std::vector<Cell> nodes;
  std::vector<AgentSet> assign;
  for (const auto& jn : doc.at("nodes")) {
    if (jn.at("id").get<std::size_t>() != nodes.size())
      throw std::invalid_argument("node ids must be consecutive from 0");
    nodes.push_back({jn.at("x").get<int>(), jn.at("y").get<int>()});
    AgentSet s;
    for (const auto& name : jn.at("capable")) {
      const std::size_t k = class_index(name.get<std::string>());
      for (AgentId a = 0; a < agents.size(); ++a)
        if (agents[a].class_index == k) s.insert(a);
    }
    assign.push_back(s);
  }
  const std::string map_path = doc.at("map").get<std::string>();
  std::filesystem::path resolved(map_path);
  if (resolved.is_relative() && !base_dir.empty() && !std::filesystem::exists(resolved))
    resolved = std::filesystem::path(base_dir) / resolved;
  const TerrainGrid grid = load_map_file(resolved.string());
  return MhppInstance::from_grid(grid, std::move(classes), std::move(nodes), std::move(assign),
                                 std::move(agents), map_path, doc.value("seed", std::uint64_t{0}));
}

void save_instance(const MhppInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << instance_to_json(inst);
}

MhppInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open instance '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace mhpp
