#include <gtest/gtest.h>

#include "mhpp/baselines.hpp"
#include "mhpp/postopt.hpp"
#include "test_util.hpp"

using namespace mhpp;

namespace {

// All locations on the x axis at the given coordinates; every agent uses class 0.
MhppInstance line_instance(const std::vector<int>& xs, std::size_t targets, std::size_t agents,
                           std::vector<AgentSet> assign = {}) {
  CostMatrix m(xs.size(), 0);
  for (std::size_t u = 0; u < xs.size(); ++u)
    for (std::size_t v = 0; v < xs.size(); ++v) m(u, v) = 10 * std::abs(xs[u] - xs[v]);
  if (assign.empty()) assign.assign(targets, AgentSet::all(agents));
  return MhppInstance(targets, std::vector<std::size_t>(agents, 0), assign, {m});
}

// Planar points, one class per distinct cost table.
MhppInstance planar_instance(const std::vector<std::pair<int, int>>& pts, std::size_t targets,
                             std::vector<std::size_t> cls, std::vector<AgentSet> assign, std::size_t classes = 1) {
  std::vector<CostMatrix> mats(classes, CostMatrix(pts.size(), 0));
  for (std::size_t k = 0; k < classes; ++k)
    for (std::size_t u = 0; u < pts.size(); ++u)
      for (std::size_t v = 0; v < pts.size(); ++v) {
        const double dx = pts[u].first - pts[v].first, dy = pts[u].second - pts[v].second;
        mats[k](u, v) = static_cast<Cost>(std::lround(std::sqrt(dx * dx + dy * dy) * 100));
      }
  return MhppInstance(targets, std::move(cls), std::move(assign), mats);
}

}  // namespace

TEST(GroupByType, Examples) {
  const auto g = load_map_file(testutil::data_path("maps/lakeland.map"));
  const auto inst = generate_random_instance(g, 60, gv_av_fleet(3, 3), 1);
  const auto groups = group_by_type(inst);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].members, (std::vector<AgentId>{0, 1, 2}));
  EXPECT_EQ(groups[1].members, (std::vector<AgentId>{3, 4, 5}));

  const auto same = line_instance({0, 1, 2, 3, 4, 5}, 2, 2);
  EXPECT_EQ(group_by_type(same).size(), 1u);

  const auto unique = line_instance({0, 1, 2, 3, 4, 5, 6, 7}, 2, 3, {AgentSet::of({0}), AgentSet::of({1, 2})});
  // Footprints: agent 0 {0}, agent 1 {1}, agent 2 {1} -> groups {0} and {1,2}.
  EXPECT_EQ(group_by_type(unique).size(), 2u);
  const auto singles = line_instance({0, 1, 2, 3, 4, 5, 6, 7, 8}, 3, 3,
                                     {AgentSet::of({0}), AgentSet::of({1}), AgentSet::of({2})});
  EXPECT_EQ(group_by_type(singles).size(), 3u);
}

TEST(TwoOpt, UncrossesAndMatchesEnumeration) {
  // Four targets on a unit square; start and goal share a corner-adjacent spot.
  const std::vector<std::pair<int, int>> pts{{0, 0}, {10, 0}, {10, 10}, {0, 10}, {-5, 5}, {-5, 5}};
  const auto inst = planar_instance(pts, 4, {0}, std::vector<AgentSet>(4, AgentSet::of({0})));
  const std::vector<LocationId> crossed{4, 0, 2, 1, 3, 5};
  const auto fixed = two_opt(inst, 0, crossed);
  EXPECT_EQ(fixed.front(), 4u);
  EXPECT_EQ(fixed.back(), 5u);
  EXPECT_LT(path_cost(inst, 0, fixed), path_cost(inst, 0, crossed));
  EXPECT_EQ(path_cost(inst, 0, fixed), testutil::best_order_cost(inst, 0, {0, 1, 2, 3}));
  EXPECT_EQ(two_opt(inst, 0, fixed), fixed);  // fixpoint
}

TEST(TwoOpt, ShortPathsNeverWorse) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = testutil::random_matrix_instance(seed, 3, 1, 1.0, false);
    std::vector<LocationId> path{inst.start_location(0), 2, 0, 1, inst.goal_location(0)};
    EXPECT_LE(path_cost(inst, 0, two_opt(inst, 0, path)), path_cost(inst, 0, path));
  }
}

TEST(InnerGroup, SingleAgentIsTwoOpt) {
  const auto inst = testutil::random_matrix_instance(5, 6, 1, 1.0, false);
  Solution sol{{{inst.start_location(0), 3, 0, 5, 1, 4, 2, inst.goal_location(0)}}};
  evaluate(inst, sol);
  Solution opt = sol;
  inner_group_opt(inst, {{0}}, opt);
  EXPECT_EQ(opt.paths[0], two_opt(inst, 0, sol.paths[0]));
}

TEST(InnerGroup, BalancesIdenticalAgentsOnALine) {
  // Targets at -3..-1 and 1..3; both agents start and end at 0.
  const auto inst = line_instance({-3, -2, -1, 1, 2, 3, 0, 0, 0, 0}, 6, 2);
  Solution sol{{{6, 3, 4, 5, 0, 1, 2, 8}, {7, 9}}};
  evaluate(inst, sol);
  ASSERT_EQ(sol.makespan, 120);
  inner_group_opt(inst, {{0, 1}}, sol);
  ASSERT_TRUE(validate_solution(inst, sol).ok());
  const Cost opt = testutil::enumerate_optimum(inst);
  EXPECT_EQ(opt, 60);
  // Within one node transfer of the optimum: the cheapest detour for one node is 2 * 10.
  EXPECT_LE(sol.makespan, opt + 20);
}

TEST(InnerGroup, BalancedInputUnchanged) {
  const auto inst = line_instance({1, -1, 0, 0, 0, 0}, 2, 2);
  Solution sol{{{2, 0, 4}, {3, 1, 5}}};
  evaluate(inst, sol);
  Solution out = sol;
  inner_group_opt(inst, {{0, 1}}, out);
  EXPECT_EQ(out.paths, sol.paths);
}

TEST(InterGroup, RespectsAssignment) {
  // Agent 0 (group A) alone can serve targets 0 and 1; agent 1 only target 2.
  const auto inst = line_instance({5, 6, 1, 0, 0, 0, 0}, 3, 2,
                                  {AgentSet::of({0}), AgentSet::of({0}), AgentSet::of({1})});
  Solution sol{{{3, 0, 1, 5}, {4, 2, 6}}};
  evaluate(inst, sol);
  const auto groups = group_by_type(inst);
  ASSERT_EQ(groups.size(), 2u);
  Solution out = sol;
  EXPECT_FALSE(inter_group_opt(inst, groups, out));
  EXPECT_EQ(out.paths, sol.paths);
}

TEST(InterGroup, SingleGroupNoImprovement) {
  const auto inst = line_instance({1, 2, 0, 0, 0, 0}, 2, 2);
  Solution sol{{{2, 0, 1, 4}, {3, 5}}};
  evaluate(inst, sol);
  EXPECT_FALSE(inter_group_opt(inst, group_by_type(inst), sol));
}

TEST(InterGroup, TransferLowersMakespan) {
  // Agent 0 carries both shared targets on opposite sides of the depot; agent 1
  // also serves them and holds one exclusive target next to the depot, so the
  // two agents form different groups.
  const std::vector<std::pair<int, int>> pts{{10, 0}, {-10, 0}, {0, 1}, {0, 0}, {0, 0}, {0, 0}, {0, 0}};
  const auto inst = planar_instance(pts, 3, {0, 0},
                                    {AgentSet::of({0, 1}), AgentSet::of({0, 1}), AgentSet::of({1})});
  const auto groups = group_by_type(inst);
  ASSERT_EQ(groups.size(), 2u);
  Solution sol{{{3, 0, 1, 5}, {4, 2, 6}}};
  evaluate(inst, sol);
  ASSERT_EQ(sol.makespan, 4000);
  EXPECT_TRUE(inter_group_opt(inst, groups, sol));
  EXPECT_TRUE(validate_solution(inst, sol).ok());
  EXPECT_LT(sol.makespan, 4000);
}

TEST(PostOptimize, OptimalInputKeepsMakespan) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = testutil::random_matrix_instance(seed, 6, 2, 1.3);
    const auto opt = brute_force_oracle(inst);
    EXPECT_EQ(post_optimize(inst, opt).makespan, opt.makespan);
  }
}

TEST(PostOptimize, BetweenOptimumAndGreedy) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto inst = testutil::random_matrix_instance(seed, 7, 2, 1.5);
    const auto b1 = greedy_b1(inst);
    const auto out = post_optimize(inst, b1);
    ASSERT_TRUE(validate_solution(inst, out).ok());
    EXPECT_LE(out.makespan, b1.makespan);
    EXPECT_GE(out.makespan, testutil::enumerate_optimum(inst));
  }
}

TEST(PostOptimize, FuzzedSolutionsStayValid) {
  Rng rng(17);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = testutil::random_matrix_instance(seed, 9, 3, 1.2);
    for (int trial = 0; trial < 20; ++trial) {
      Solution sol;
      for (AgentId a = 0; a < 3; ++a) sol.paths.push_back({inst.start_location(a)});
      std::vector<LocationId> order(9);
      std::iota(order.begin(), order.end(), 0);
      rng.partial_shuffle(order, order.size());
      for (LocationId v : order) {
        std::vector<AgentId> able;
        for (AgentId a = 0; a < 3; ++a)
          if (inst.can_serve(a, v)) able.push_back(a);
        sol.paths[able[rng.below(able.size())]].push_back(v);
      }
      for (AgentId a = 0; a < 3; ++a) sol.paths[a].push_back(inst.goal_location(a));
      evaluate(inst, sol);
      const auto out = post_optimize(inst, sol);
      ASSERT_TRUE(validate_solution(inst, out).ok());
      EXPECT_LE(out.makespan, sol.makespan);
    }
  }
}
