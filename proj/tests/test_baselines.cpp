#include <gtest/gtest.h>

#include "mhpp/baselines.hpp"
#include "mhpp/postopt.hpp"
#include "test_util.hpp"

using namespace mhpp;

TEST(GreedyB1, SingleNode) {
  const auto inst = testutil::random_matrix_instance(3, 1, 1, 1.0, false);
  const auto sol = greedy_b1(inst);
  EXPECT_EQ(sol.paths[0], (std::vector<LocationId>{1, 0, 2}));
}

TEST(GreedyB1, InfeasibleFleet) {
  // Target 0 can only be served by agent 1, and agent 1 cannot reach it.
  CostMatrix m(5, 10);
  for (std::size_t i = 0; i < 5; ++i) m(i, i) = 0;
  CostMatrix cut = m;
  cut(0, 2) = cut(2, 0) = cut(0, 4) = cut(4, 0) = kInfiniteCost;
  const MhppInstance inst(1, {0, 1}, {AgentSet::of({1})}, {m, cut});
  EXPECT_THROW(greedy_b1(inst), InfeasibleInstance);
  EXPECT_THROW(brute_force_oracle(inst), InfeasibleInstance);
}

TEST(GreedyB1, AvOnlyNodesWithGroundFleet) {
  const auto g = load_map_file(testutil::data_path("maps/lakeland.map"));
  const auto mixed = generate_random_instance(g, 6, gv_av_fleet(1, 1), 2);
  // Rebuild with the AV dropped: AV-only targets become unservable.
  std::vector<AgentSet> assign;
  for (LocationId v = 0; v < 6; ++v) assign.push_back(mixed.capable(v).contains(0) ? AgentSet::of({0}) : AgentSet());
  EXPECT_THROW(MhppInstance(6, {0}, assign, {CostMatrix(8, 0)}), std::invalid_argument);
}

TEST(Oracle, MatchesEnumeration) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto one = testutil::random_matrix_instance(seed, 3, 1, 1.0, false);
    EXPECT_EQ(brute_force_oracle(one).makespan, testutil::enumerate_optimum(one));
    const auto two = testutil::random_matrix_instance(seed, 6, 2, 1.4);
    const auto sol = brute_force_oracle(two);
    EXPECT_TRUE(validate_solution(two, sol).ok());
    EXPECT_EQ(sol.makespan, testutil::enumerate_optimum(two)) << "seed " << seed;
  }
}

TEST(Oracle, ForcedPartitionAndEmpty) {
  const auto inst = testutil::random_matrix_instance(8, 4, 2, 1.0, false);
  std::vector<AgentSet> forced{AgentSet::of({0}), AgentSet::of({1}), AgentSet::of({0}), AgentSet::of({1})};
  std::vector<CostMatrix> mats{inst.class_costs(0), inst.class_costs(1)};
  const MhppInstance f(4, {0, 1}, forced, mats);
  const auto sol = brute_force_oracle(f);
  EXPECT_EQ(sol.makespan, std::max(testutil::best_order_cost(f, 0, {0, 2}), testutil::best_order_cost(f, 1, {1, 3})));

  CostMatrix m(4, 0);
  m(0, 2) = m(2, 0) = 7;
  m(1, 3) = m(3, 1) = 9;
  const MhppInstance empty(0, {0, 0}, {}, {m});
  EXPECT_EQ(brute_force_oracle(empty).makespan, 9);
}

TEST(Oracle, RefusesLargeInstances) {
  const auto inst = testutil::random_matrix_instance(1, 11, 2);
  EXPECT_THROW(brute_force_oracle(inst), OracleRefused);
}

TEST(Baselines, OrderingAgainstOracle) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const auto inst = testutil::random_matrix_instance(seed, 7, 3, 1.3);
    const auto b1 = greedy_b1(inst);
    const auto b2 = greedy_b2(inst);
    const Cost opt = brute_force_oracle(inst).makespan;
    ASSERT_TRUE(validate_solution(inst, b1).ok());
    ASSERT_TRUE(validate_solution(inst, b2).ok());
    EXPECT_LE(opt, b2.makespan);
    EXPECT_LE(b2.makespan, b1.makespan);
  }
}

TEST(Baselines, SingleAgentB2IsTwoOptOfB1) {
  const auto inst = testutil::random_matrix_instance(6, 7, 1, 1.0, false);
  const auto b1 = greedy_b1(inst);
  const auto b2 = greedy_b2(inst);
  EXPECT_EQ(b2.paths[0], two_opt(inst, 0, b1.paths[0]));
}

TEST(Baselines, DeterministicOnGridInstance) {
  const auto g = load_map_file(testutil::data_path("maps/lakeland.map"));
  const auto inst = generate_random_instance(g, 20, gv_av_fleet(2, 2), 5);
  EXPECT_EQ(greedy_b1(inst).paths, greedy_b1(inst).paths);
  EXPECT_EQ(greedy_b2(inst).paths, greedy_b2(inst).paths);
}
