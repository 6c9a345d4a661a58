#include "mhpp/baselines.hpp"

#include <algorithm>
#include <tuple>

#include "mhpp/postopt.hpp"

namespace mhpp {

Solution greedy_b1(const MhppInstance& inst) {
  const std::size_t na = inst.num_agents();
  Solution sol;
  std::vector<Cost> open_cost(na, 0);  // cost so far, without the goal leg
  for (AgentId a = 0; a < na; ++a) sol.paths.push_back({inst.start_location(a)});
  auto full_cost = [&](AgentId a) {
    return add_cost(open_cost[a], inst.cost(a, sol.paths[a].back(), inst.goal_location(a)));
  };

  std::vector<char> placed(inst.num_targets(), 0);
  for (std::size_t round = 0; round < inst.num_targets(); ++round) {
    std::vector<Cost> current(na);
    for (AgentId a = 0; a < na; ++a) current[a] = full_cost(a);

    // (makespan, receiver cost, node, agent)
    std::tuple<Cost, Cost, LocationId, AgentId> best{kInfiniteCost, kInfiniteCost, 0, 0};
    bool found = false;
    for (LocationId v = 0; v < inst.num_targets(); ++v) {
      if (placed[v]) continue;
      for (AgentId a = 0; a < na; ++a) {
        if (!inst.can_serve(a, v)) continue;
        const Cost step = inst.cost(a, sol.paths[a].back(), v);
        const Cost home = inst.cost(a, v, inst.goal_location(a));
        const Cost cost = add_cost(add_cost(open_cost[a], step), home);
        if (cost == kInfiniteCost) continue;
        Cost makespan = cost;
        for (AgentId b = 0; b < na; ++b)
          if (b != a) makespan = std::max(makespan, current[b]);
        const auto key = std::make_tuple(makespan, cost, v, a);
        if (!found || key < best) {
          best = key;
          found = true;
        }
      }
    }
    if (!found) throw InfeasibleInstance("greedy: some node has no capable agent that can reach it");
    const auto [makespan, cost, v, a] = best;
    open_cost[a] = add_cost(open_cost[a], inst.cost(a, sol.paths[a].back(), v));
    sol.paths[a].push_back(v);
    placed[v] = 1;
  }
  for (AgentId a = 0; a < na; ++a) {
    if (inst.cost(a, sol.paths[a].back(), inst.goal_location(a)) == kInfiniteCost)
      throw InfeasibleInstance("greedy: agent " + std::to_string(a) + " cannot reach its goal");
    sol.paths[a].push_back(inst.goal_location(a));
  }
  evaluate(inst, sol);
  return sol;
}

Solution greedy_b2(const MhppInstance& inst) { return post_optimize(inst, greedy_b1(inst)); }

namespace {

// Held-Karp over the agent's capable targets: best[S] is the cheapest
// start -> (all of S) -> goal path, with enough bookkeeping to rebuild it.
struct AgentTable {
  std::vector<LocationId> nodes;  // local index -> target id
  std::vector<Cost> best;         // by local subset mask
  std::vector<std::vector<Cost>> end_at;  // [mask][last]
};

AgentTable agent_table(const MhppInstance& inst, AgentId a) {
  AgentTable t;
  for (LocationId v = 0; v < inst.num_targets(); ++v)
    if (inst.can_serve(a, v)) t.nodes.push_back(v);
  const std::size_t k = t.nodes.size();
  const std::size_t full = std::size_t{1} << k;
  const LocationId s = inst.start_location(a);
  const LocationId g = inst.goal_location(a);
  t.end_at.assign(full, std::vector<Cost>(k, kInfiniteCost));
  for (std::size_t j = 0; j < k; ++j) t.end_at[std::size_t{1} << j][j] = inst.cost(a, s, t.nodes[j]);
  for (std::size_t mask = 1; mask < full; ++mask)
    for (std::size_t j = 0; j < k; ++j) {
      const Cost here = t.end_at[mask][j];
      if (!(mask >> j & 1u) || here == kInfiniteCost) continue;
      for (std::size_t n = 0; n < k; ++n) {
        if (mask >> n & 1u) continue;
        const Cost c = add_cost(here, inst.cost(a, t.nodes[j], t.nodes[n]));
        auto& slot = t.end_at[mask | (std::size_t{1} << n)][n];
        slot = std::min(slot, c);
      }
    }
  t.best.assign(full, kInfiniteCost);
  t.best[0] = inst.cost(a, s, g);
  for (std::size_t mask = 1; mask < full; ++mask)
    for (std::size_t j = 0; j < k; ++j)
      if (mask >> j & 1u)
        t.best[mask] = std::min(t.best[mask], add_cost(t.end_at[mask][j], inst.cost(a, t.nodes[j], g)));
  return t;
}

std::vector<LocationId> rebuild_path(const MhppInstance& inst, AgentId a, const AgentTable& t,
                                     std::size_t mask) {
  const LocationId s = inst.start_location(a);
  const LocationId g = inst.goal_location(a);
  std::vector<LocationId> rev{g};
  LocationId next = g;
  Cost remaining = t.best[mask];
  while (mask != 0) {
    std::size_t pick = t.nodes.size();
    for (std::size_t j = 0; j < t.nodes.size() && pick == t.nodes.size(); ++j)
      if ((mask >> j & 1u) && t.end_at[mask][j] != kInfiniteCost &&
          add_cost(t.end_at[mask][j], inst.cost(a, t.nodes[j], next)) == remaining)
        pick = j;
    remaining = t.end_at[mask][pick];
    next = t.nodes[pick];
    rev.push_back(next);
    mask &= ~(std::size_t{1} << pick);
  }
  rev.push_back(s);
  return {rev.rbegin(), rev.rend()};
}

}  // namespace

Solution brute_force_oracle(const MhppInstance& inst, const OracleLimits& limits) {
  if (inst.num_targets() > limits.max_targets || inst.num_agents() > limits.max_agents)
    throw OracleRefused("oracle limited to " + std::to_string(limits.max_targets) + " nodes and " +
                        std::to_string(limits.max_agents) + " agents");
  const std::size_t na = inst.num_agents();
  const std::size_t nt = inst.num_targets();
  std::vector<AgentTable> tables;
  for (AgentId a = 0; a < na; ++a) tables.push_back(agent_table(inst, a));

  // Enumerate assignments node by node; prune on the running makespan bound.
  std::vector<std::size_t> global_mask(na, 0);  // global target bitmask per agent
  std::vector<std::size_t> best_assign;
  Cost best = kInfiniteCost;

  auto local_mask = [&](AgentId a, std::size_t gmask) {
    std::size_t m = 0;
    for (std::size_t j = 0; j < tables[a].nodes.size(); ++j)
      if (gmask >> tables[a].nodes[j] & 1u) m |= std::size_t{1} << j;
    return m;
  };

  auto recurse = [&](auto&& self, LocationId v) -> void {
    if (v == nt) {
      Cost m = 0;
      for (AgentId a = 0; a < na && m < best; ++a)
        m = std::max(m, tables[a].best[local_mask(a, global_mask[a])]);
      if (m < best) {
        best = m;
        best_assign = global_mask;
      }
      return;
    }
    for (AgentId a = 0; a < na; ++a) {
      if (!inst.can_serve(a, v)) continue;
      global_mask[a] |= std::size_t{1} << v;
      self(self, v + 1);
      global_mask[a] &= ~(std::size_t{1} << v);
    }
  };
  recurse(recurse, 0);
  if (best == kInfiniteCost) throw InfeasibleInstance("oracle: no feasible assignment");

  Solution sol;
  for (AgentId a = 0; a < na; ++a)
    sol.paths.push_back(rebuild_path(inst, a, tables[a], local_mask(a, best_assign[a])));
  evaluate(inst, sol);
  return sol;
}

SolverReport single_solution_report(std::string algorithm, const Solution& sol, double elapsed_ms) {
  SolverReport r;
  r.algorithm = std::move(algorithm);
  r.status = SolveStatus::Feasible;
  r.incumbents.push_back({sol.makespan, sol.total, elapsed_ms, 0.0});
  r.best = sol;
  r.elapsed_ms = elapsed_ms;
  return r;
}

}  // namespace mhpp
