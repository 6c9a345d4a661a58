#include "mhpp/exploresim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mhpp/baselines.hpp"
#include "mhpp/peaf.hpp"
#include "mhpp/rng.hpp"

namespace mhpp::explore {

namespace {

Cost octile(Cell a, Cell b) {
  const Cost dx = std::abs(a.x - b.x);
  const Cost dy = std::abs(a.y - b.y);
  return std::min(dx, dy) * kDiagonalStep + (std::max(dx, dy) - std::min(dx, dy)) * kCardinalStep;
}

// Euclidean distance in thousandths, rounded; integer so ties are exact.
Cost euclid_scaled(Cell a, Cell b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::llround(1000.0 * std::sqrt(dx * dx + dy * dy));
}

bool sight_blocker(Terrain t) { return t == Terrain::Obstacle || t == Terrain::Tree; }

// Member of `members` minimizing summed distance to all members, among those
// accepted by `eligible`. Members are in row-major order, so strict < keeps the first.
template <class Eligible>
std::optional<std::size_t> medoid(const std::vector<Frontier>& frontiers,
                                  const std::vector<std::size_t>& members, Eligible&& eligible) {
  std::optional<std::size_t> best;
  Cost best_sum = kInfiniteCost;
  for (std::size_t m : members) {
    if (!eligible(m)) continue;
    Cost sum = 0;
    for (std::size_t o : members) sum += euclid_scaled(frontiers[m].cell, frontiers[o].cell);
    if (sum < best_sum) {
      best_sum = sum;
      best = m;
    }
  }
  return best;
}

std::vector<Cell> path_from(const DistanceField& field, int width, std::size_t target) {
  std::vector<Cell> rev;
  for (std::int64_t i = static_cast<std::int64_t>(target); i >= 0; i = field.parent[i])
    rev.push_back({static_cast<int>(i % width), static_cast<int>(i / width)});
  return {rev.rbegin(), rev.rend()};
}

}  // namespace

LocalWindow local_window(Cell center, int radius, int width, int height) {
  return {std::max(0, center.x - radius), std::max(0, center.y - radius),
          std::min(width - 1, center.x + radius), std::min(height - 1, center.y + radius)};
}

std::vector<std::size_t> sense(const TerrainGrid& truth, KnownGrid& known, Cell at, int radius) {
  std::vector<std::size_t> revealed;
  auto reveal = [&](Cell c) {
    const std::size_t i = known.index(c);
    if (known.reveal(i, truth.at(c))) revealed.push_back(i);
  };
  reveal(at);
  const int r2 = radius * radius;
  for (int y = at.y - radius; y <= at.y + radius; ++y)
    for (int x = at.x - radius; x <= at.x + radius; ++x) {
      const Cell c{x, y};
      if (!known.in_bounds(c) || c == at) continue;
      const int dx = x - at.x;
      const int dy = y - at.y;
      if (dx * dx + dy * dy > r2) continue;
      // Bresenham from the robot towards c; any blocker strictly between hides c.
      const int sx = dx > 0 ? 1 : -1;
      const int sy = dy > 0 ? 1 : -1;
      const int ax = std::abs(dx);
      const int ay = std::abs(dy);
      int err = ax - ay;
      Cell p = at;
      bool visible = true;
      while (true) {
        const int e2 = 2 * err;
        if (e2 > -ay) {
          err -= ay;
          p.x += sx;
        }
        if (e2 < ax) {
          err += ax;
          p.y += sy;
        }
        if (p == c) break;
        if (sight_blocker(truth.at(p))) {
          visible = false;
          break;
        }
      }
      if (visible) reveal(c);
    }
  return revealed;
}

std::vector<Frontier> detect_frontiers(const KnownGrid& known, const std::vector<AgentClass>& robot_classes,
                                       const std::vector<AgentClass>& classes) {
  TerrainSet any;
  for (const auto* list : {&robot_classes, &classes})
    for (const auto& k : *list)
      for (int t = 0; t < kTerrainCount; ++t)
        if (k.passable.contains(static_cast<Terrain>(t))) any.insert(static_cast<Terrain>(t));
  std::vector<Frontier> out;
  for (std::size_t i = 0; i < known.size(); ++i) {
    if (!known.known(i) || !any.contains(known.terrain(i))) continue;
    AgentSet capable;
    for (AgentId r = 0; r < robot_classes.size(); ++r)
      if (robot_classes[r].passable.contains(known.terrain(i))) capable.insert(r);
    const Cell c = known.cell_at(i);
    bool borders_unknown = false;
    for (const auto& m : kGridMoves) {
      const Cell n{c.x + m.dx, c.y + m.dy};
      if (known.in_bounds(n) && !known.known(n)) {
        borders_unknown = true;
        break;
      }
    }
    if (borders_unknown) out.push_back({c, capable});
  }
  return out;
}

std::vector<FrontierCluster> cluster_frontiers(const std::vector<Frontier>& frontiers, double radius,
                                               AgentSet team) {
  // Single linkage would chain a connected frontier line into one cluster, so
  // each cluster is seeded at the first unassigned frontier (row-major) and
  // takes every unassigned frontier within `radius` of the seed.
  const std::size_t n = frontiers.size();
  const double r2 = radius * radius;
  std::vector<char> taken(n, 0);
  std::vector<FrontierCluster> clusters;
  for (std::size_t i = 0; i < n; ++i) {
    if (taken[i]) continue;
    auto& k = clusters.emplace_back();
    for (std::size_t j = i; j < n; ++j) {
      if (taken[j]) continue;
      const double dx = frontiers[i].cell.x - frontiers[j].cell.x;
      const double dy = frontiers[i].cell.y - frontiers[j].cell.y;
      if (dx * dx + dy * dy <= r2) {
        taken[j] = 1;
        k.members.push_back(j);
      }
    }
  }
  for (auto& k : clusters) {
    k.representative = frontiers[*medoid(frontiers, k.members, [](std::size_t) { return true; })].cell;
    std::size_t hetero = 0;
    for (std::size_t m : k.members) hetero += frontiers[m].capable != team;
    k.hetero_fraction = static_cast<double>(hetero) / static_cast<double>(k.members.size());
  }
  return clusters;
}

double hetero_fraction_for(const FrontierCluster& cluster, const std::vector<Frontier>& frontiers,
                           AgentId robot, AgentSet team) {
  if (cluster.members.empty()) return 0.0;
  std::size_t hetero = 0;
  for (std::size_t m : cluster.members) {
    const AgentSet& a = frontiers[m].capable;
    hetero += a != team && a.contains(robot);
  }
  return static_cast<double>(hetero) / static_cast<double>(cluster.members.size());
}

std::vector<std::size_t> open_tsp_order(const CostMatrix& costs) {
  const std::size_t n = costs.size();
  if (n <= 1) return {};
  const std::size_t k = n - 1;  // vertices 1..n-1
  if (n <= 10) {
    const std::size_t full = std::size_t{1} << k;
    std::vector<std::vector<Cost>> dp(full, std::vector<Cost>(k, kInfiniteCost));
    for (std::size_t j = 0; j < k; ++j) dp[std::size_t{1} << j][j] = costs(0, j + 1);
    for (std::size_t mask = 1; mask < full; ++mask)
      for (std::size_t j = 0; j < k; ++j) {
        if (!(mask >> j & 1u) || dp[mask][j] == kInfiniteCost) continue;
        for (std::size_t t = 0; t < k; ++t) {
          if (mask >> t & 1u) continue;
          auto& slot = dp[mask | (std::size_t{1} << t)][t];
          slot = std::min(slot, add_cost(dp[mask][j], costs(j + 1, t + 1)));
        }
      }
    std::size_t mask = full - 1;
    std::size_t last = 0;
    for (std::size_t j = 1; j < k; ++j)
      if (dp[mask][j] < dp[mask][last]) last = j;
    std::vector<std::size_t> rev{last + 1};
    while (mask != (std::size_t{1} << last)) {
      const std::size_t prev_mask = mask & ~(std::size_t{1} << last);
      std::size_t prev = k;
      for (std::size_t j = 0; j < k && prev == k; ++j)
        if ((prev_mask >> j & 1u) && dp[prev_mask][j] != kInfiniteCost &&
            add_cost(dp[prev_mask][j], costs(j + 1, last + 1)) == dp[mask][last])
          prev = j;
      if (prev == k) break;  // unreachable vertices; order is arbitrary beyond here
      mask = prev_mask;
      last = prev;
      rev.push_back(last + 1);
    }
    std::vector<std::size_t> order(rev.rbegin(), rev.rend());
    for (std::size_t v = 1; v < n; ++v)
      if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    return order;
  }

  // Nearest neighbour from vertex 0, then best-improvement 2-opt on the open path.
  std::vector<std::size_t> seq{0};
  std::vector<char> used(n, 0);
  used[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 1; v < n; ++v)
      if (!used[v] && (best == n || costs(seq.back(), v) < costs(seq.back(), best))) best = v;
    used[best] = 1;
    seq.push_back(best);
  }
  auto edge = [&](std::size_t a, std::size_t b) -> Cost {
    const Cost c = costs(seq[a], seq[b]);
    return c == kInfiniteCost ? Cost{1} << 50 : c;
  };
  while (true) {
    Cost best_delta = 0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 1; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Cost delta = edge(i - 1, j) - edge(i - 1, i);
        if (j + 1 < n) delta += edge(i, j + 1) - edge(j, j + 1);
        if (delta < best_delta) {
          best_delta = delta;
          bi = i;
          bj = j;
        }
      }
    if (best_delta >= 0) break;
    std::reverse(seq.begin() + static_cast<std::ptrdiff_t>(bi), seq.begin() + static_cast<std::ptrdiff_t>(bj) + 1);
  }
  return {seq.begin() + 1, seq.end()};
}

LocalPlan local_plan(const KnownGrid& known, const AgentClass& cls, Cell robot_cell,
                     const std::vector<LocalCandidate>& candidates, double alpha, Cost c0) {
  const int w = known.width();
  const int h = known.height();
  auto passable = [&](std::size_t i) { return known.known(i) && cls.passable.contains(known.terrain(i)); };
  const DistanceField from_robot = grid_dijkstra(w, h, known.index(robot_cell), passable);

  LocalPlan plan;
  plan.adjusted_start_costs.assign(candidates.size(), kInfiniteCost);
  std::vector<std::size_t> reachable;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Cost raw = from_robot.dist[known.index(candidates[k].representative)];
    if (raw == kInfiniteCost) continue;
    const Cost bonus = std::llround(alpha * candidates[k].hetero_fraction * static_cast<double>(c0));
    plan.adjusted_start_costs[k] = std::max<Cost>(raw - bonus, 0);
    reachable.push_back(k);
  }
  if (reachable.empty()) return plan;

  const std::size_t m = reachable.size();
  CostMatrix costs(m + 1, 0);
  for (std::size_t a = 0; a < m; ++a) {
    costs(0, a + 1) = costs(a + 1, 0) = plan.adjusted_start_costs[reachable[a]];
    const DistanceField f =
        grid_dijkstra(w, h, known.index(candidates[reachable[a]].representative), passable);
    for (std::size_t b = 0; b < m; ++b)
      if (b != a) costs(a + 1, b + 1) = f.dist[known.index(candidates[reachable[b]].representative)];
  }
  for (std::size_t v : open_tsp_order(costs)) plan.order.push_back(reachable[v - 1]);
  plan.first = plan.order.front();
  plan.path = path_from(from_robot, w, known.index(candidates[*plan.first].representative));
  return plan;
}

std::vector<std::optional<AgentId>> priority_assign(const std::vector<RobotState>& robots,
                                                    const std::vector<OwnershipInput>& clusters,
                                                    int window_radius, int width, int height,
                                                    bool use_priority) {
  std::vector<LocalWindow> windows;
  for (const auto& r : robots) windows.push_back(local_window(r.cell, window_radius, width, height));
  std::vector<std::optional<AgentId>> owners(clusters.size());
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    std::vector<AgentId> in_window;
    for (AgentId i = 0; i < robots.size(); ++i)
      if (clusters[k].capable.contains(i) && windows[i].contains(clusters[k].representative))
        in_window.push_back(i);
    if (in_window.empty()) continue;
    AgentId best = in_window.front();
    const bool by_priority = use_priority && clusters[k].hetero && in_window.size() > 1;
    for (AgentId i : in_window) {
      if (by_priority) {
        if (robots[i].priority > robots[best].priority) best = i;
      } else if (octile(robots[i].cell, clusters[k].representative) <
                 octile(robots[best].cell, clusters[k].representative)) {
        best = i;
      }
    }
    owners[k] = best;
  }
  return owners;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(const ExploreScenario& scenario)
    : scenario_(scenario), known_(scenario.map.width(), scenario.map.height()) {
  const auto& p = scenario.params;
  if (scenario.robots.empty() || scenario.robots.size() > kMaxAgents)
    throw std::invalid_argument("scenario needs between 1 and 64 robots");
  if (p.sense_radius < 0 || p.window_radius < 0 || p.cluster_radius < 0 || p.replan_period <= 0)
    throw std::invalid_argument("scenario parameters out of range");
  Rng rng(p.seed);
  for (AgentId i = 0; i < scenario.robots.size(); ++i) {
    const auto& rc = scenario.robots[i];
    if (rc.class_index >= scenario.classes.size()) throw std::invalid_argument("robot class index out of range");
    const AgentClass& cls = scenario.classes[rc.class_index];
    if (!scenario.map.in_bounds(rc.start) || !traversable(scenario.map, rc.start, cls))
      throw std::invalid_argument("robot " + std::to_string(i) + " starts on a cell its class cannot occupy");
    Cell start = rc.start;
    if (p.start_jitter > 0) {
      std::vector<Cell> options;
      for (int y = rc.start.y - p.start_jitter; y <= rc.start.y + p.start_jitter; ++y)
        for (int x = rc.start.x - p.start_jitter; x <= rc.start.x + p.start_jitter; ++x) {
          const Cell c{x, y};
          if (scenario.map.in_bounds(c) && traversable(scenario.map, c, cls) &&
              shortest_path_cost(scenario.map, rc.start, c, cls) != kInfiniteCost)
            options.push_back(c);
        }
      start = options[rng.below(options.size())];
    }
    RobotState r;
    r.id = i;
    r.class_index = rc.class_index;
    r.cell = start;
    r.priority = rc.priority ? *rc.priority : cls.priority;
    robots_.push_back(r);
    robot_classes_.push_back(cls);
  }
  team_ = AgentSet::all(robots_.size());
  metrics_.robot_distance.assign(robots_.size(), 0);
  for (const auto& r : robots_) sense(scenario_.map, known_, r.cell, p.sense_radius);
  record();
}

void Simulator::record() {
  metrics_.coverage.push_back(static_cast<double>(known_.known_count()) / static_cast<double>(known_.size()));
  for (auto& r : robots_) {
    r.trace.push_back(r.cell);
    metrics_.trace.push_back({tick_, r.id, r.cell, known_.known_count()});
  }
}

DistanceField Simulator::known_field(const RobotState& r) const {
  const AgentClass& cls = robot_classes_[r.id];
  return grid_dijkstra(known_.width(), known_.height(), known_.index(r.cell), [&](std::size_t i) {
    return known_.known(i) && cls.passable.contains(known_.terrain(i));
  });
}

void Simulator::refresh() {
  const std::size_t num_classes = scenario_.classes.size();
  reach_.clear();
  class_reach_.assign(num_classes, std::vector<Cost>(known_.size(), kInfiniteCost));
  for (const auto& r : robots_) {
    const AgentClass& cls = robot_classes_[r.id];
    reach_.push_back(grid_dijkstra(known_.width(), known_.height(), known_.index(r.cell), [&](std::size_t i) {
      return !known_.known(i) || cls.passable.contains(known_.terrain(i));
    }));
    auto& best = class_reach_[r.class_index];
    for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::min(best[i], reach_.back().dist[i]);
  }

  const std::vector<Frontier> all = detect_frontiers(known_, robot_classes_, scenario_.classes);
  frontiers_.clear();
  for (const auto& f : all) {
    const std::size_t i = known_.index(f.cell);
    bool reachable = false;
    for (AgentId r = 0; r < robots_.size() && !reachable; ++r)
      reachable = f.capable.contains(r) && reach_[r].dist[i] != kInfiniteCost;
    if (reachable) frontiers_.push_back(f);
  }
  metrics_.unreachable_frontiers = all.size() - frontiers_.size();
  frontier_mask_.assign(known_.size(), 0);
  for (const auto& f : frontiers_) frontier_mask_[known_.index(f.cell)] = 1;

  clusters_ = cluster_frontiers(frontiers_, scenario_.params.cluster_radius, team_);
  class_reps_.assign(clusters_.size(), std::vector<std::optional<Cell>>(num_classes));
  ownership_.assign(clusters_.size(), {});
  for (std::size_t k = 0; k < clusters_.size(); ++k) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      const auto& cls = scenario_.classes[c];
      const auto m = medoid(frontiers_, clusters_[k].members, [&](std::size_t f) {
        const std::size_t i = known_.index(frontiers_[f].cell);
        return cls.passable.contains(known_.terrain(i)) && class_reach_[c][i] != kInfiniteCost;
      });
      if (m) class_reps_[k][c] = frontiers_[*m].cell;
    }
    ownership_[k].representative = clusters_[k].representative;
    ownership_[k].hetero = clusters_[k].hetero_fraction > 0;
    for (const auto& r : robots_) {
      const auto& rep = class_reps_[k][r.class_index];
      if (rep && reach_[r.id].dist[known_.index(*rep)] != kInfiniteCost) ownership_[k].capable.insert(r.id);
    }
  }
  owners_ = priority_assign(robots_, ownership_, scenario_.params.window_radius, known_.width(),
                            known_.height(), scenario_.params.priority_assignment);
}

Simulator::GlobalAssignment Simulator::global_plan(const std::vector<std::size_t>& cluster_ids,
                                                   const std::vector<AgentId>& agents) const {
  GlobalAssignment out;
  out.waypoint.assign(robots_.size(), std::nullopt);
  if (agents.empty()) return out;

  // Nodes the participating robots can serve; the rest are deferred.
  std::vector<AgentSet> assign;
  for (std::size_t k : cluster_ids) {
    AgentSet a;
    for (std::size_t j = 0; j < agents.size(); ++j)
      if (ownership_[k].capable.contains(agents[j])) a.insert(static_cast<AgentId>(j));
    if (a.empty()) continue;
    out.node_clusters.push_back(k);
    assign.push_back(a);
  }
  const std::size_t n = out.node_clusters.size();
  if (n == 0) return out;
  const std::size_t na = agents.size();

  // Optimistic per-class distance fields from each node's class representative.
  const std::size_t num_classes = scenario_.classes.size();
  std::vector<std::vector<std::optional<DistanceField>>> node_fields(num_classes,
                                                                      std::vector<std::optional<DistanceField>>(n));
  for (AgentId a : agents) {
    const std::size_t c = robots_[a].class_index;
    const AgentClass& cls = scenario_.classes[c];
    for (std::size_t v = 0; v < n; ++v) {
      const auto& rep = class_reps_[out.node_clusters[v]][c];
      if (node_fields[c][v] || !rep) continue;
      node_fields[c][v] = grid_dijkstra(known_.width(), known_.height(), known_.index(*rep), [&](std::size_t i) {
        return !known_.known(i) || cls.passable.contains(known_.terrain(i));
      });
    }
  }

  // One matrix per participating robot: node legs use its class, start legs its own field.
  std::vector<CostMatrix> matrices;
  std::vector<std::size_t> agent_matrix;
  const std::size_t locs = n + 2 * na;
  for (std::size_t j = 0; j < na; ++j) {
    const RobotState& r = robots_[agents[j]];
    const std::size_t c = r.class_index;
    CostMatrix m(locs, kInfiniteCost);
    for (std::size_t u = 0; u < locs; ++u) m(u, u) = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (!node_fields[c][u]) continue;
      for (std::size_t v = 0; v < n; ++v) {
        const auto& rep_v = class_reps_[out.node_clusters[v]][c];
        if (u != v && rep_v) m(u, v) = node_fields[c][u]->dist[known_.index(*rep_v)];
      }
      const Cost from_start = reach_[r.id].dist[known_.index(*class_reps_[out.node_clusters[u]][c])];
      m(u, n + j) = m(n + j, u) = from_start;
    }
    // Goals are virtual: a robot may stop anywhere.
    for (std::size_t g = 0; g < na; ++g)
      for (std::size_t u = 0; u < locs; ++u) m(n + na + g, u) = m(u, n + na + g) = 0;
    // Symmetrize node legs (fields are symmetric up to unreachable sides).
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v) m(u, v) = m(v, u) = std::min(m(u, v), m(v, u));
    matrices.push_back(std::move(m));
    agent_matrix.push_back(j);
  }
  out.instance.emplace(n, agent_matrix, assign, matrices);

  PeafOptions opts;
  opts.expansion_limit = scenario_.params.peaf_expansions;
  const SolverReport report = solve_peaf(*out.instance, opts);
  if (report.best) {
    out.solution = report.best;
  } else {
    try {
      out.solution = greedy_b1(*out.instance);
    } catch (const InfeasibleInstance&) {
      return out;
    }
  }
  for (std::size_t j = 0; j < na; ++j) {
    const auto& path = out.solution->paths[j];
    if (path.size() > 2 && out.instance->is_target(path[1]))
      out.waypoint[agents[j]] = class_reps_[out.node_clusters[path[1]]][robots_[agents[j]].class_index];
  }
  return out;
}

void Simulator::plan() {
  const auto& p = scenario_.params;
  const double alpha = p.hetero_cost ? p.alpha : 0.0;

  std::vector<char> local_failed(robots_.size(), 0);
  for (auto& r : robots_) {
    if (r.target) {
      const std::size_t t = known_.index(*r.target);
      bool keep = *r.target != r.cell && frontier_mask_[t] && reach_[r.id].dist[t] != kInfiniteCost;
      if (keep && !r.target_is_local)
        keep = std::find(owners_.begin(), owners_.end(), std::optional<AgentId>(r.id)) == owners_.end();
      if (!keep) r.target.reset();
    }
    if (r.target) continue;

    std::vector<LocalCandidate> cands;
    for (std::size_t k = 0; k < clusters_.size(); ++k) {
      if (owners_[k] != r.id) continue;
      cands.push_back({*class_reps_[k][r.class_index], hetero_fraction_for(clusters_[k], frontiers_, r.id, team_)});
    }
    if (cands.empty()) continue;
    const LocalPlan lp = local_plan(known_, robot_classes_[r.id], r.cell, cands, alpha, p.effective_c0());
    if (lp.first) {
      r.target = cands[*lp.first].representative;
      r.target_is_local = true;
    } else {
      local_failed[r.id] = 1;
    }
  }

  const bool periodic = tick_ % static_cast<std::size_t>(p.replan_period) == 0;
  std::vector<AgentId> agents;
  for (const auto& r : robots_)
    if (!r.target || (periodic && !r.target_is_local)) agents.push_back(r.id);
  if (agents.empty()) return;

  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < clusters_.size(); ++k)
    if (!owners_[k] || local_failed[*owners_[k]]) nodes.push_back(k);
  if (nodes.empty()) return;

  ++metrics_.global_replans;
  const GlobalAssignment ga = global_plan(nodes, agents);
  for (AgentId a : agents) {
    robots_[a].target = ga.waypoint[a];
    robots_[a].target_is_local = false;
  }
}

void Simulator::move_robots() {
  for (auto& r : robots_) {
    if (!r.target || *r.target == r.cell) continue;
    const std::size_t t = known_.index(*r.target);
    std::vector<Cell> path;
    if (r.target_is_local) {
      const DistanceField f = known_field(r);
      if (f.dist[t] != kInfiniteCost) path = path_from(f, known_.width(), t);
    }
    if (path.empty() && reach_[r.id].dist[t] != kInfiniteCost) path = path_from(reach_[r.id], known_.width(), t);
    if (path.size() < 2) continue;
    const Cell next = path[1];
    // Neighbours are always sensed, so this only fails with a zero sensing radius.
    const std::size_t ni = known_.index(next);
    if (!known_.known(ni) || !robot_classes_[r.id].passable.contains(known_.terrain(ni))) continue;
    const Cost step = (next.x != r.cell.x && next.y != r.cell.y) ? kDiagonalStep : kCardinalStep;
    r.cell = next;
    r.distance += step;
    metrics_.robot_distance[r.id] += step;
    metrics_.total_distance += step;
  }
}

bool Simulator::step() {
  if (finished_) return false;
  refresh();
  if (observer_) observer_({tick_, known_, robots_, frontiers_, clusters_, owners_, ownership_});
  if (frontiers_.empty()) {
    finished_ = true;
    metrics_.complete = true;
  } else if (tick_ >= scenario_.params.tick_cap) {
    finished_ = true;
    metrics_.complete = false;
  }
  if (finished_) {
    metrics_.ticks = tick_;
    return false;
  }
  plan();
  move_robots();
  ++tick_;
  for (const auto& r : robots_) sense(scenario_.map, known_, r.cell, scenario_.params.sense_radius);
  record();
  metrics_.ticks = tick_;
  return true;
}

EpisodeMetrics Simulator::run(const std::function<void(const TickView&)>& observer) {
  observer_ = observer;
  while (step()) {
  }
  observer_ = nullptr;
  return metrics_;
}

EpisodeMetrics run_episode(const ExploreScenario& scenario, const std::function<void(const TickView&)>& observer) {
  Simulator sim(scenario);
  return sim.run(observer);
}

}  // namespace mhpp::explore
