#include <gtest/gtest.h>

#include "mhpp/instance.hpp"
#include "test_util.hpp"

using namespace mhpp;

namespace {

// 2 targets, 2 agents (class 0 and class 1). Locations: t0, t1, s0, s1, g0, g1.
MhppInstance hand_instance() {
  CostMatrix a(6, 0), b(6, 0);
  const auto put = [](CostMatrix& m, std::size_t u, std::size_t v, Cost c) { m(u, v) = m(v, u) = c; };
  const Cost ca[6][6] = {{0, 5, 2, 4, 3, 6}, {5, 0, 7, 1, 8, 2}, {2, 7, 0, 9, 1, 9},
                         {4, 1, 9, 0, 9, 1}, {3, 8, 1, 9, 0, 9}, {6, 2, 9, 1, 9, 0}};
  for (std::size_t u = 0; u < 6; ++u)
    for (std::size_t v = u + 1; v < 6; ++v) {
      put(a, u, v, ca[u][v]);
      put(b, u, v, 2 * ca[u][v]);
    }
  return MhppInstance(2, {0, 1}, {AgentSet::of({0, 1}), AgentSet::of({1})}, {a, b});
}

}  // namespace

TEST(Instance, ConstructionChecks) {
  CostMatrix m(4, 0);
  EXPECT_THROW(MhppInstance(2, {0}, {AgentSet::of({0})}, {m}), std::invalid_argument);  // assign size
  EXPECT_THROW(MhppInstance(2, {0}, {AgentSet::of({0}), AgentSet()}, {m}), std::invalid_argument);  // empty A(v)
  CostMatrix asym(4, 0);
  asym(0, 1) = 3;
  EXPECT_THROW(MhppInstance(2, {0}, {AgentSet::of({0}), AgentSet::of({0})}, {asym}), std::invalid_argument);
}

TEST(Instance, CostRespectsAssignment) {
  const auto inst = hand_instance();
  EXPECT_EQ(inst.cost(0, 1, 3), kInfiniteCost);  // agent 0 cannot serve target 1
  EXPECT_EQ(inst.cost(1, 1, 3), 2);
  EXPECT_EQ(inst.min_cost(0, 2), 2);
}

TEST(Generate, SettingARatio) {
  const auto g = load_map_file(testutil::data_path("maps/lakeland.map"));
  const auto inst = generate_random_instance(g, 60, gv_av_fleet(3, 3), 1);
  EXPECT_EQ(inst.num_targets(), 60u);
  EXPECT_EQ(inst.num_agents(), 6u);
  std::size_t normal = 0, av_only = 0;
  for (LocationId v = 0; v < 60; ++v) {
    if (inst.capable(v) == inst.all_agents()) ++normal;
    if (inst.capable(v) == AgentSet::of({3, 4, 5})) ++av_only;
  }
  EXPECT_EQ(normal, 40u);
  EXPECT_EQ(av_only, 20u);
}

TEST(Generate, RatioArithmetic) {
  EXPECT_EQ(normal_node_count(3), 2u);
  EXPECT_EQ(normal_node_count(60), 40u);
  EXPECT_EQ(normal_node_count(20), 14u);
  const auto g = load_map_file(testutil::data_path("maps/lakeland.map"));
  const auto inst = generate_random_instance(g, 3, gv_av_fleet(1, 1), 4);
  std::size_t normal = 0;
  for (LocationId v = 0; v < 3; ++v) normal += inst.capable(v) == inst.all_agents();
  EXPECT_EQ(normal, 2u);
}

TEST(Generate, DeterministicAndRoundTrips) {
  const auto g = load_map_file(testutil::data_path("maps/lakeland.map"));
  const auto a = generate_random_instance(g, 20, gv_av_fleet(2, 2), 7, {}, testutil::data_path("maps/lakeland.map"));
  const auto b = generate_random_instance(g, 20, gv_av_fleet(2, 2), 7, {}, testutil::data_path("maps/lakeland.map"));
  EXPECT_EQ(instance_to_json(a), instance_to_json(b));
  const auto c = instance_from_json(instance_to_json(a));
  EXPECT_EQ(instance_to_json(c), instance_to_json(a));
  for (AgentId k = 0; k < a.num_agents(); ++k)
    for (LocationId u = 0; u < a.num_locations(); ++u)
      for (LocationId v = 0; v < a.num_locations(); ++v) ASSERT_EQ(a.cost(k, u, v), c.cost(k, u, v));
  const auto other = generate_random_instance(g, 20, gv_av_fleet(2, 2), 8, {}, testutil::data_path("maps/lakeland.map"));
  EXPECT_NE(instance_to_json(a), instance_to_json(other));
}

TEST(Generate, TooManyNodesFails) {
  TerrainGrid g(3, 3, Terrain::Ground);
  EXPECT_THROW(generate_random_instance(g, 20, gv_av_fleet(1, 1), 1), GenerationError);
}

TEST(Validate, Violations) {
  const auto inst = hand_instance();
  Solution missing{{{2, 0, 4}, {3, 5}}};
  EXPECT_EQ(validate_solution(inst, missing).violation, Violation::NodeUnvisited);
  Solution wrong{{{2, 0, 1, 4}, {3, 5}}};
  EXPECT_EQ(validate_solution(inst, wrong).violation, Violation::AssignmentViolated);
  Solution repeated{{{2, 0, 4}, {3, 1, 0, 5}}};
  EXPECT_EQ(validate_solution(inst, repeated).violation, Violation::NodeRepeated);
  Solution endpoints{{{0, 2, 4}, {3, 1, 5}}};
  EXPECT_EQ(validate_solution(inst, endpoints).violation, Violation::Endpoint);
  Solution agents{{{2, 0, 4}}};
  EXPECT_EQ(validate_solution(inst, agents).violation, Violation::AgentCount);
}

TEST(Validate, HandSum) {
  const auto inst = hand_instance();
  Solution sol{{{2, 0, 4}, {3, 1, 5}}};
  const auto r = validate_solution(inst, sol);
  ASSERT_TRUE(r.ok()) << r.message;
  const Cost p0 = 2 + 3;              // s0-t0, t0-g0 in class 0
  const Cost p1 = 2 * 1 + 2 * 2;      // s1-t1, t1-g1 in class 1
  EXPECT_EQ(r.makespan, std::max(p0, p1));
  EXPECT_EQ(r.total, p0 + p1);
}

TEST(Validate, EmptySolutionLegs) {
  const auto inst = hand_instance();
  auto sol = empty_solution(inst);
  evaluate(inst, sol);
  EXPECT_EQ(sol.makespan, std::max<Cost>(1, 2));  // s0-g0 = 1, s1-g1 = 2*1
}
