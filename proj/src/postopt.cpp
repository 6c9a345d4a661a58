#include "mhpp/postopt.hpp"

#include <algorithm>
#include <optional>

namespace mhpp {

std::vector<PathGroup> group_by_type(const MhppInstance& inst) {
  // Footprint key: one bit per target.
  std::vector<std::vector<bool>> footprints;
  std::vector<PathGroup> groups;
  for (AgentId a = 0; a < inst.num_agents(); ++a) {
    std::vector<bool> fp(inst.num_targets());
    for (LocationId v = 0; v < inst.num_targets(); ++v) fp[v] = inst.can_serve(a, v);
    auto it = std::find(footprints.begin(), footprints.end(), fp);
    if (it == footprints.end()) {
      footprints.push_back(std::move(fp));
      groups.push_back({{a}});
    } else {
      groups[static_cast<std::size_t>(it - footprints.begin())].members.push_back(a);
    }
  }
  return groups;
}

std::vector<LocationId> two_opt(const MhppInstance& inst, AgentId agent,
                                std::vector<LocationId> path) {
  const std::size_t n = path.size();
  if (n < 4) return path;
  auto c = [&](LocationId u, LocationId v) { return inst.cost(agent, u, v); };
  for (;;) {
    Cost best_delta = 0;
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    for (std::size_t i = 1; i + 2 < n; ++i) {
      for (std::size_t j = i + 1; j + 1 < n; ++j) {
        const Cost a = c(path[i - 1], path[j]);
        const Cost b = c(path[i], path[j + 1]);
        if (a == kInfiniteCost || b == kInfiniteCost) continue;
        const Cost delta = a + b - c(path[i - 1], path[i]) - c(path[j], path[j + 1]);
        if (delta < best_delta) {
          best_delta = delta;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_delta >= 0) break;
    std::reverse(path.begin() + static_cast<std::ptrdiff_t>(best_i),
                 path.begin() + static_cast<std::ptrdiff_t>(best_j) + 1);
  }
  return path;
}

Insertion best_insertion(const MhppInstance& inst, AgentId agent,
                         const std::vector<LocationId>& path, LocationId node) {
  Insertion best;
  for (std::size_t pos = 1; pos < path.size(); ++pos) {
    const Cost in = inst.cost(agent, path[pos - 1], node);
    const Cost out = inst.cost(agent, node, path[pos]);
    if (in == kInfiniteCost || out == kInfiniteCost) continue;
    const Cost added = in + out - inst.cost(agent, path[pos - 1], path[pos]);
    if (added < best.added) best = {pos, added};
  }
  return best;
}

namespace {

struct Relocation {
  std::size_t from_index = 0;  // position in donor path
  Insertion insertion;
  Cost new_makespan = kInfiniteCost;
  Cost total_change = 0;
  LocationId node = 0;
};

bool better(const Relocation& a, const Relocation& b) {
  if (a.new_makespan != b.new_makespan) return a.new_makespan < b.new_makespan;
  if (a.total_change != b.total_change) return a.total_change < b.total_change;
  return a.node < b.node;
}

// Best single-node move from `donor` to `receiver`. `others` is the largest
// path cost among agents whose paths stay untouched.
std::optional<Relocation> best_relocation(const MhppInstance& inst, const Solution& sol,
                                          const std::vector<Cost>& costs, AgentId donor,
                                          AgentId receiver, Cost others) {
  const auto& dp = sol.paths[donor];
  const auto& rp = sol.paths[receiver];
  std::optional<Relocation> best;
  for (std::size_t k = 1; k + 1 < dp.size(); ++k) {
    const LocationId v = dp[k];
    if (!inst.can_serve(receiver, v)) continue;
    const Cost shortcut = inst.cost(donor, dp[k - 1], dp[k + 1]);
    if (shortcut == kInfiniteCost) continue;
    const Cost donor_cost = costs[donor] - inst.cost(donor, dp[k - 1], v) -
                            inst.cost(donor, v, dp[k + 1]) + shortcut;
    const Insertion ins = best_insertion(inst, receiver, rp, v);
    if (ins.added == kInfiniteCost) continue;
    const Cost receiver_cost = costs[receiver] + ins.added;
    Relocation r{k, ins, std::max({donor_cost, receiver_cost, others}),
                 donor_cost + receiver_cost - costs[donor] - costs[receiver], v};
    if (!best || better(r, *best)) best = r;
  }
  return best;
}

void apply(Solution& sol, AgentId donor, AgentId receiver, const Relocation& r) {
  auto& dp = sol.paths[donor];
  dp.erase(dp.begin() + static_cast<std::ptrdiff_t>(r.from_index));
  auto& rp = sol.paths[receiver];
  rp.insert(rp.begin() + static_cast<std::ptrdiff_t>(r.insertion.position), r.node);
}

std::vector<Cost> path_costs(const MhppInstance& inst, const Solution& sol) {
  std::vector<Cost> out;
  for (AgentId a = 0; a < sol.paths.size(); ++a) out.push_back(path_cost(inst, a, sol.paths[a]));
  return out;
}

// Longest and shortest members; lowest id wins ties.
std::pair<AgentId, AgentId> extremes(const std::vector<AgentId>& members, const std::vector<Cost>& costs) {
  AgentId longest = members.front();
  AgentId shortest = members.front();
  for (AgentId a : members) {
    if (costs[a] > costs[longest]) longest = a;
    if (costs[a] < costs[shortest]) shortest = a;
  }
  return {longest, shortest};
}

Cost max_excluding(const std::vector<AgentId>& members, const std::vector<Cost>& costs, AgentId x,
                   AgentId y) {
  Cost m = 0;
  for (AgentId a : members)
    if (a != x && a != y) m = std::max(m, costs[a]);
  return m;
}

}  // namespace

void inner_group_opt(const MhppInstance& inst, const PathGroup& group, Solution& sol) {
  for (;;) {
    for (AgentId a : group.members) sol.paths[a] = two_opt(inst, a, std::move(sol.paths[a]));
    if (group.members.size() < 2) break;
    const auto costs = path_costs(inst, sol);
    const auto [longest, shortest] = extremes(group.members, costs);
    if (costs[longest] == costs[shortest]) break;
    const Cost others = max_excluding(group.members, costs, longest, shortest);
    auto move = best_relocation(inst, sol, costs, longest, shortest, others);
    if (!move || move->new_makespan >= costs[longest]) break;
    apply(sol, longest, shortest, *move);
  }
  evaluate(inst, sol);
}

bool inter_group_opt(const MhppInstance& inst, const std::vector<PathGroup>& groups, Solution& sol) {
  if (groups.size() < 2) return false;
  const auto costs = path_costs(inst, sol);
  AgentId longest = 0;
  for (AgentId a = 0; a < costs.size(); ++a)
    if (costs[a] > costs[longest]) longest = a;

  std::size_t donor_group = 0;
  for (std::size_t g = 0; g < groups.size(); ++g)
    if (std::find(groups[g].members.begin(), groups[g].members.end(), longest) !=
        groups[g].members.end())
      donor_group = g;

  std::optional<std::size_t> target;
  Cost target_makespan = kInfiniteCost;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g == donor_group) continue;
    Cost m = 0;
    for (AgentId a : groups[g].members) m = std::max(m, costs[a]);
    if (m < target_makespan) {
      target_makespan = m;
      target = g;
    }
  }
  if (!target) return false;
  const AgentId receiver = extremes(groups[*target].members, costs).second;

  std::vector<AgentId> everyone(costs.size());
  for (AgentId a = 0; a < everyone.size(); ++a) everyone[a] = a;
  const Cost others = max_excluding(everyone, costs, longest, receiver);
  auto move = best_relocation(inst, sol, costs, longest, receiver, others);
  if (!move || move->new_makespan >= costs[longest]) return false;
  apply(sol, longest, receiver, *move);
  evaluate(inst, sol);
  return true;
}

Solution post_optimize(const MhppInstance& inst, Solution sol) {
  const auto groups = group_by_type(inst);
  for (const auto& g : groups) inner_group_opt(inst, g, sol);
  while (inter_group_opt(inst, groups, sol)) {
  }
  for (const auto& g : groups) inner_group_opt(inst, g, sol);
  evaluate(inst, sol);
  return sol;
}

}  // namespace mhpp
