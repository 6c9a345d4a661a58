#pragma once

#include <vector>

#include "mhpp/instance.hpp"

namespace mhpp {

// Agents whose capability footprints {v : i in A(v)} coincide.
struct PathGroup {
  std::vector<AgentId> members;
};

// Groups ordered by smallest member id.
std::vector<PathGroup> group_by_type(const MhppInstance& inst);

// Best-improvement 2-opt with fixed endpoints, run to a fixpoint.
std::vector<LocationId> two_opt(const MhppInstance& inst, AgentId agent,
                                std::vector<LocationId> path);

// Cheapest insertion of `node` between consecutive entries of `path`.
struct Insertion {
  std::size_t position = 0;  // insert before path[position]
  Cost added = kInfiniteCost;
};
Insertion best_insertion(const MhppInstance& inst, AgentId agent,
                         const std::vector<LocationId>& path, LocationId node);

// 2-opt every member, then relocate single nodes from the group's longest
// path to its shortest one while that lowers the inner-group makespan.
void inner_group_opt(const MhppInstance& inst, const PathGroup& group, Solution& sol);

// One relocation from the globally longest path into the shortest path of
// the other group with the smallest inner-group makespan. Returns true when
// a move lowering the global makespan was applied.
bool inter_group_opt(const MhppInstance& inst, const std::vector<PathGroup>& groups, Solution& sol);

Solution post_optimize(const MhppInstance& inst, Solution sol);

}  // namespace mhpp
