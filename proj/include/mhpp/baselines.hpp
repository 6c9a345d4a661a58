#pragma once

#include <stdexcept>

#include "mhpp/instance.hpp"
#include "mhpp/peaf.hpp"

namespace mhpp {

class InfeasibleInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// B1: repeatedly append the (node, agent) pair giving the smallest resulting
// makespan; ties by the receiving agent's resulting path cost, then node id,
// then agent id. Throws InfeasibleInstance when a node cannot be placed.
Solution greedy_b1(const MhppInstance& inst);

// B2: post_optimize(greedy_b1(inst)).
Solution greedy_b2(const MhppInstance& inst);

struct OracleLimits {
  std::size_t max_targets = 10;
  std::size_t max_agents = 3;
};

// Exact minimum-makespan solution by per-agent subset dynamic programming
// combined over all capability-respecting partitions. Throws OracleRefused
// beyond the limits and InfeasibleInstance when no solution exists.
Solution brute_force_oracle(const MhppInstance& inst, const OracleLimits& limits = {});

// Single-solution report wrapper so every algorithm serializes the same way.
SolverReport single_solution_report(std::string algorithm, const Solution& sol, double elapsed_ms);

}  // namespace mhpp
