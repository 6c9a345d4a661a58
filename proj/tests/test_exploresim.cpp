#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "mhpp/baselines.hpp"
#include "mhpp/exploresim.hpp"
#include "test_util.hpp"

using namespace mhpp;
using namespace mhpp::explore;

namespace {

KnownGrid fully_known(const TerrainGrid& g) {
  KnownGrid k(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) k.reveal(i, g.cells()[i]);
  return k;
}

RobotState robot(AgentId id, Cell at, int priority, std::size_t cls = 0) {
  RobotState r;
  r.id = id;
  r.cell = at;
  r.priority = priority;
  r.class_index = cls;
  return r;
}

ExploreScenario scenario_on(const std::string& map, std::vector<RobotConfig> robots) {
  ExploreScenario sc{load_map_file(testutil::data_path(map)), map, {ground_vehicle_class(), aerial_vehicle_class()},
                     std::move(robots), {}};
  return sc;
}

// Cells that some robot class can reach from its start through its own terrain.
std::vector<std::size_t> reachable_cells(const ExploreScenario& sc, const std::vector<RobotState>& robots) {
  std::set<std::size_t> out;
  for (const auto& r : robots) {
    const auto d = testutil::relax_distances(sc.map, r.trace.front(), sc.classes[r.class_index]);
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] != kInfiniteCost) out.insert(i);
  }
  return {out.begin(), out.end()};
}

}  // namespace

TEST(Sense, ZeroRadius) {
  TerrainGrid g(5, 5, Terrain::Ground);
  KnownGrid k(5, 5);
  const auto revealed = sense(g, k, {2, 2}, 0);
  EXPECT_EQ(revealed.size(), 1u);
  EXPECT_EQ(k.known_count(), 1u);
  EXPECT_TRUE(k.known(Cell{2, 2}));
}

TEST(Sense, OpenFieldDisk) {
  TerrainGrid g(11, 11, Terrain::Ground);
  KnownGrid k(11, 11);
  sense(g, k, {5, 5}, 3);
  for (int y = 0; y < 11; ++y)
    for (int x = 0; x < 11; ++x) {
      const int d2 = (x - 5) * (x - 5) + (y - 5) * (y - 5);
      EXPECT_EQ(k.known(Cell{x, y}), d2 <= 9) << x << "," << y;
    }
}

TEST(Sense, WallBlocksSight) {
  // Robot at (0,2); a wall occupies column 2. The wall is seen, cells behind it are not.
  TerrainGrid g(5, 5, Terrain::Ground);
  for (int y = 0; y < 5; ++y) g.set({2, y}, Terrain::Obstacle);
  KnownGrid k(5, 5);
  sense(g, k, {0, 2}, 4);
  EXPECT_TRUE(k.known(Cell{2, 2}));
  EXPECT_EQ(k.terrain(k.index(Cell{2, 2})), Terrain::Obstacle);
  EXPECT_FALSE(k.known(Cell{3, 2}));
  EXPECT_FALSE(k.known(Cell{4, 2}));
  // Trees block sight the same way.
  TerrainGrid t(5, 1, Terrain::Ground);
  t.set({2, 0}, Terrain::Tree);
  KnownGrid kt(5, 1);
  sense(t, kt, {0, 0}, 4);
  EXPECT_TRUE(kt.known(Cell{2, 0}));
  EXPECT_FALSE(kt.known(Cell{3, 0}));
}

TEST(Sense, Monotone) {
  TerrainGrid g(9, 9, Terrain::Ground);
  KnownGrid k(9, 9);
  sense(g, k, {4, 4}, 3);
  const auto before = k.known_count();
  EXPECT_TRUE(sense(g, k, {4, 4}, 2).empty());
  EXPECT_EQ(k.known_count(), before);
  EXPECT_FALSE(k.reveal(k.index(Cell{4, 4}), Terrain::Water));
  EXPECT_EQ(k.terrain(k.index(Cell{4, 4})), Terrain::Ground);
}

TEST(Frontiers, FullyKnownIsEmpty) {
  TerrainGrid g(6, 6, Terrain::Ground);
  EXPECT_TRUE(detect_frontiers(fully_known(g), {ground_vehicle_class()}).empty());
}

TEST(Frontiers, RingAroundDisk) {
  TerrainGrid g(15, 15, Terrain::Ground);
  KnownGrid k(15, 15);
  sense(g, k, {7, 7}, 3);
  const auto fs = detect_frontiers(k, {ground_vehicle_class()});
  ASSERT_FALSE(fs.empty());
  std::set<std::pair<int, int>> got;
  for (const auto& f : fs) got.insert({f.cell.x, f.cell.y});
  for (int y = 0; y < 15; ++y)
    for (int x = 0; x < 15; ++x) {
      bool border = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Cell n{x + dx, y + dy};
          if (k.in_bounds(n) && !k.known(n)) border = true;
        }
      EXPECT_EQ(got.count({x, y}) == 1, k.known(Cell{x, y}) && border) << x << "," << y;
    }
  EXPECT_EQ(got.count({7, 7}), 0u);
  // Row-major order.
  for (std::size_t i = 1; i < fs.size(); ++i)
    EXPECT_LT(k.index(fs[i - 1].cell), k.index(fs[i].cell));
}

TEST(Frontiers, WaterCorridorIsAerialOnly) {
  TerrainGrid g(7, 3, Terrain::Water);
  KnownGrid k(7, 3);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) k.reveal(k.index(Cell{x, y}), Terrain::Water);
  const auto fs = detect_frontiers(k, {ground_vehicle_class(), aerial_vehicle_class()});
  ASSERT_FALSE(fs.empty());
  for (const auto& f : fs) EXPECT_EQ(f.capable, AgentSet::of({1}));
  // A ground-only team still sees them when the aerial class is declared.
  const auto gv_only = detect_frontiers(k, {ground_vehicle_class()}, {ground_vehicle_class(), aerial_vehicle_class()});
  ASSERT_EQ(gv_only.size(), fs.size());
  for (const auto& f : gv_only) EXPECT_TRUE(f.capable.empty());
  EXPECT_TRUE(detect_frontiers(k, {ground_vehicle_class()}).empty());
}

TEST(Clusters, Examples) {
  const AgentSet team = AgentSet::of({0, 1});
  const auto one = cluster_frontiers({{{3, 3}, team}}, 3.0, team);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].hetero_fraction, 0.0);
  EXPECT_EQ(one[0].representative, (Cell{3, 3}));
  const auto hetero = cluster_frontiers({{{3, 3}, AgentSet::of({1})}}, 3.0, team);
  EXPECT_EQ(hetero[0].hetero_fraction, 1.0);

  const auto apart = cluster_frontiers({{{0, 0}, team}, {{4, 0}, team}}, 3.0, team);
  EXPECT_EQ(apart.size(), 2u);

  const std::vector<Frontier> four{{{0, 0}, AgentSet::of({1})}, {{1, 0}, team}, {{2, 0}, AgentSet::of({1})}, {{1, 1}, team}};
  const auto mixed = cluster_frontiers(four, 3.0, team);
  ASSERT_EQ(mixed.size(), 1u);
  EXPECT_DOUBLE_EQ(mixed[0].hetero_fraction, 0.5);
  EXPECT_EQ(mixed[0].representative, (Cell{1, 0}));  // medoid
  EXPECT_DOUBLE_EQ(hetero_fraction_for(mixed[0], four, 1, team), 0.5);
  EXPECT_DOUBLE_EQ(hetero_fraction_for(mixed[0], four, 0, team), 0.0);
}

TEST(Clusters, LongLineIsSplit) {
  // A connected frontier line must not collapse into a single cluster.
  const AgentSet team = AgentSet::of({0});
  std::vector<Frontier> line;
  for (int x = 0; x < 20; ++x) line.push_back({{x, 0}, team});
  const auto cs = cluster_frontiers(line, 3.0, team);
  EXPECT_GT(cs.size(), 1u);
  std::size_t members = 0;
  for (const auto& c : cs) {
    members += c.members.size();
    for (auto m : c.members) EXPECT_LE(std::abs(line[m].cell.x - line[c.members.front()].cell.x), 3);
  }
  EXPECT_EQ(members, line.size());
}

TEST(OpenTsp, MatchesEnumerationLarge) {
  // Above the exact threshold the heuristic still returns a permutation from vertex 0.
  const auto inst = testutil::random_matrix_instance(3, 12, 1, 1.0, false);
  CostMatrix m(12, 0);
  for (std::size_t u = 0; u < 12; ++u)
    for (std::size_t v = 0; v < 12; ++v) m(u, v) = inst.class_costs(0)(u, v);
  const auto order = open_tsp_order(m);
  ASSERT_EQ(order.size(), 11u);
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < 11; ++i) EXPECT_EQ(sorted[i], i + 1);
}

TEST(LocalPlan, AlphaZeroUsesRawCosts) {
  TerrainGrid g(10, 10, Terrain::Ground);
  const auto k = fully_known(g);
  const std::vector<LocalCandidate> cands{{{5, 0}, 1.0}, {{0, 3}, 0.0}};
  const auto lp = local_plan(k, ground_vehicle_class(), {0, 0}, cands, 0.0, 14000);
  EXPECT_EQ(lp.adjusted_start_costs[0], 5000);
  EXPECT_EQ(lp.adjusted_start_costs[1], 3000);
  ASSERT_TRUE(lp.first);
  EXPECT_EQ(*lp.first, 1u);
  EXPECT_EQ(lp.path.front(), (Cell{0, 0}));
  EXPECT_EQ(lp.path.back(), (Cell{0, 3}));
}

TEST(LocalPlan, HeteroBonusPullsFirstTarget) {
  TerrainGrid g(10, 10, Terrain::Ground);
  const auto k = fully_known(g);
  // Hetero cluster at raw cost c0 = 6000; a plain one at 3000 in the opposite direction.
  const std::vector<LocalCandidate> cands{{{6, 0}, 1.0}, {{0, 3}, 0.0}};
  const auto lp = local_plan(k, aerial_vehicle_class(), {0, 0}, cands, 1.0, 6000);
  EXPECT_EQ(lp.adjusted_start_costs[0], 0);
  ASSERT_TRUE(lp.first);
  EXPECT_EQ(*lp.first, 0u);
}

TEST(LocalPlan, UnknownCellsBlockAndUnreachableFails) {
  TerrainGrid g(6, 1, Terrain::Ground);
  KnownGrid k(6, 1);
  for (int x = 0; x < 3; ++x) k.reveal(k.index(Cell{x, 0}), Terrain::Ground);
  k.reveal(k.index(Cell{5, 0}), Terrain::Ground);
  const auto lp = local_plan(k, ground_vehicle_class(), {0, 0}, {{{5, 0}, 0.0}}, 0.6, 14000);
  EXPECT_FALSE(lp.first);
}

TEST(LocalPlan, TourMatchesEnumeration) {
  // Hand-built known map with a wall; four representatives.
  TerrainGrid g(12, 8, Terrain::Ground);
  for (int y = 0; y < 6; ++y) g.set({5, y}, Terrain::Obstacle);
  const auto k = fully_known(g);
  const Cell start{1, 1};
  const std::vector<LocalCandidate> cands{{{9, 1}, 0.0}, {{3, 6}, 0.0}, {{10, 6}, 0.0}, {{2, 3}, 0.0}};
  const auto lp = local_plan(k, ground_vehicle_class(), start, cands, 0.0, 14000);
  ASSERT_EQ(lp.order.size(), 4u);

  const auto gv = ground_vehicle_class();
  std::vector<Cell> pts{start};
  for (const auto& c : cands) pts.push_back(c.representative);
  std::vector<std::vector<Cost>> d(5, std::vector<Cost>(5));
  for (std::size_t a = 0; a < 5; ++a) {
    const auto field = testutil::relax_distances(g, pts[a], gv);
    for (std::size_t b = 0; b < 5; ++b) d[a][b] = field[g.index(pts[b])];
  }
  const auto tour_cost = [&](const std::vector<std::size_t>& order) {
    Cost c = 0;
    std::size_t at = 0;
    for (auto v : order) {
      c += d[at][v + 1];
      at = v + 1;
    }
    return c;
  };
  std::vector<std::size_t> perm{0, 1, 2, 3};
  Cost best = kInfiniteCost;
  do best = std::min(best, tour_cost(perm));
  while (std::next_permutation(perm.begin(), perm.end()));
  EXPECT_EQ(tour_cost(lp.order), best);
}

TEST(PriorityAssign, Examples) {
  const std::vector<RobotState> robots{robot(0, {5, 5}, 1, 0), robot(1, {8, 5}, 2, 1)};
  // Hetero cluster in both windows, closer to the GV: the AV (higher priority) owns it.
  std::vector<OwnershipInput> in{{{5, 6}, AgentSet::of({0, 1}), true}};
  EXPECT_EQ(priority_assign(robots, in, 10, 30, 30, true)[0], std::optional<AgentId>(1));
  // Without priority the nearer robot wins.
  EXPECT_EQ(priority_assign(robots, in, 10, 30, 30, false)[0], std::optional<AgentId>(0));
  // Capability dominates: GV-only cluster goes to the GV.
  in = {{{8, 6}, AgentSet::of({0}), true}};
  EXPECT_EQ(priority_assign(robots, in, 10, 30, 30, true)[0], std::optional<AgentId>(0));
  // Non-hetero overlapping cluster: nearest capable robot.
  in = {{{8, 6}, AgentSet::of({0, 1}), false}};
  EXPECT_EQ(priority_assign(robots, in, 10, 30, 30, true)[0], std::optional<AgentId>(1));
  // Outside every window: no owner.
  in = {{{29, 29}, AgentSet::of({0, 1}), true}};
  EXPECT_FALSE(priority_assign(robots, in, 3, 30, 30, true)[0]);
}

TEST(PriorityAssign, DisjointWindowsUseNearest) {
  const std::vector<RobotState> robots{robot(0, {2, 2}, 1, 0), robot(1, {25, 25}, 2, 1)};
  const std::vector<OwnershipInput> in{{{3, 3}, AgentSet::of({0, 1}), true}, {{24, 24}, AgentSet::of({0, 1}), true}};
  for (bool prio : {true, false}) {
    const auto owners = priority_assign(robots, in, 4, 30, 30, prio);
    EXPECT_EQ(owners[0], std::optional<AgentId>(0));
    EXPECT_EQ(owners[1], std::optional<AgentId>(1));
  }
}

TEST(GlobalPlan, OneClusterOneRobot) {
  auto sc = scenario_on("maps/crafted/open20.map", {{0, {3, 3}, {}}});
  sc.params.sense_radius = 3;
  Simulator sim(sc);
  sim.refresh();
  ASSERT_FALSE(sim.clusters().empty());
  const auto ga = sim.global_plan({0}, {0});
  ASSERT_TRUE(ga.waypoint[0]);
  EXPECT_EQ(*ga.waypoint[0], sim.clusters()[0].representative);
}

TEST(GlobalPlan, SnapshotMatchesOracle) {
  auto sc = scenario_on("maps/village60.map", {{0, {2, 2}, 1}, {1, {3, 2}, 2}});
  Simulator sim(sc);
  for (int t = 0; t < 25; ++t) sim.step();
  sim.refresh();
  std::vector<std::size_t> ids;
  for (std::size_t k = 0; k < sim.clusters().size() && ids.size() < 5; ++k) ids.push_back(k);
  ASSERT_EQ(ids.size(), 5u);
  const auto ga = sim.global_plan(ids, {0, 1});
  ASSERT_TRUE(ga.instance && ga.solution);
  EXPECT_TRUE(validate_solution(*ga.instance, *ga.solution).ok());
  EXPECT_EQ(ga.solution->makespan, brute_force_oracle(*ga.instance).makespan);
  EXPECT_EQ(ga.solution->makespan, testutil::enumerate_optimum(*ga.instance));
}

TEST(Episode, OpenFieldFullCoverage) {
  ExploreScenario sc{TerrainGrid(10, 10, Terrain::Ground), "", {ground_vehicle_class()}, {{0, {0, 0}, {}}}, {}};
  sc.params.sense_radius = 3;
  const auto m = run_episode(sc);
  EXPECT_TRUE(m.complete);
  EXPECT_DOUBLE_EQ(m.coverage.back(), 1.0);
  for (std::size_t i = 1; i < m.coverage.size(); ++i) EXPECT_GE(m.coverage[i], m.coverage[i - 1]);
}

TEST(Episode, WaterPocketExploredByAerialOnly) {
  auto sc = scenario_on("maps/crafted/pocket.map", {{0, {2, 2}, {}}, {1, {3, 2}, {}}});
  Simulator sim(sc);
  std::size_t ticks = 0;
  const auto m = sim.run([&](const TickView& v) {
    ++ticks;
    // Ownership uniqueness: owners vector covers each cluster once.
    EXPECT_EQ(v.owners.size(), v.clusters.size());
  });
  EXPECT_TRUE(m.complete);
  const auto& robots = sim.robots();
  for (const auto& r : robots)
    for (const auto& c : r.trace)
      EXPECT_TRUE(sc.classes[r.class_index].passable.contains(sc.map.at(c)));
  bool av_in_pocket = false;
  for (const auto& c : robots[1].trace) av_in_pocket |= c.x >= 9 && c.x <= 14 && c.y >= 9 && c.y <= 14;
  for (const auto& c : robots[0].trace) EXPECT_FALSE(c.x >= 6 && c.x <= 17 && c.y >= 6 && c.y <= 17);
  EXPECT_TRUE(av_in_pocket || sim.known().known(Cell{11, 11}));
  for (auto i : reachable_cells(sc, robots)) EXPECT_TRUE(sim.known().known(i)) << i;
}

TEST(Episode, GroundOnlyFleetFlagsAerialFrontiers) {
  auto sc = scenario_on("maps/crafted/lake.map", {{0, {2, 2}, {}}});
  const auto m = run_episode(sc);
  EXPECT_TRUE(m.complete);
  EXPECT_GT(m.unreachable_frontiers, 0u);
}

TEST(Episode, DeterministicAndJitterBySeed) {
  auto sc = load_scenario(testutil::data_path("scenarios/village60.json"));
  sc.params.tick_cap = 150;
  const auto a = run_episode(sc);
  const auto b = run_episode(sc);
  EXPECT_EQ(trace_to_csv(a), trace_to_csv(b));
  EXPECT_EQ(metrics_to_json(a), metrics_to_json(b));
  EXPECT_FALSE(a.complete);
  EXPECT_EQ(a.ticks, 150u);
  sc.params.seed = 99;
  const auto c = run_episode(sc);
  EXPECT_NE(trace_to_csv(a), trace_to_csv(c));
}

TEST(Scenario, ParsesAndValidates) {
  const std::string text = R"({"map": "maps/crafted/open20.map",
    "robots": [{"class": "GV", "start": [2, 2]}, {"class": "AV", "start": [3, 2], "priority": 5}],
    "params": {"sense_radius": 4, "alpha": 0.3, "c0": 9000, "priority_assignment": false}})";
  const auto sc = scenario_from_json(text, MHPP_DATA_DIR);
  EXPECT_EQ(sc.robots.size(), 2u);
  EXPECT_EQ(sc.robots[1].class_index, 1u);
  EXPECT_EQ(sc.robots[1].priority, std::optional<int>(5));
  EXPECT_EQ(sc.params.sense_radius, 4);
  EXPECT_DOUBLE_EQ(sc.params.alpha, 0.3);
  EXPECT_EQ(sc.params.effective_c0(), 9000);
  EXPECT_FALSE(sc.params.priority_assignment);
  EXPECT_THROW(scenario_from_json(R"({"map": "maps/crafted/open20.map", "robots": [{"class": "XX", "start": [2, 2]}]})",
                                  MHPP_DATA_DIR),
               std::invalid_argument);
  EXPECT_THROW(Simulator(scenario_from_json(R"({"map": "maps/crafted/open20.map", "robots": [{"class": "GV", "start": [0, 0]}]})",
                                            MHPP_DATA_DIR)),
               std::invalid_argument);
}
