#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mhpp/gridmap.hpp"

namespace mhpp {

using AgentId = std::uint32_t;
// Location ids: targets occupy [0, N), agent starts [N, N + Na), agent goals [N + Na, N + 2 Na).
using LocationId = std::uint32_t;

inline constexpr std::size_t kMaxAgents = 64;

// Set of agent ids, at most kMaxAgents.
class AgentSet {
 public:
  constexpr AgentSet() = default;
  constexpr explicit AgentSet(std::uint64_t bits) : bits_(bits) {}
  static AgentSet all(std::size_t n) {
    return AgentSet(n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }
  static AgentSet of(std::initializer_list<AgentId> ids) {
    AgentSet s;
    for (auto id : ids) s.insert(id);
    return s;
  }
  constexpr void insert(AgentId a) { bits_ |= std::uint64_t{1} << a; }
  constexpr void erase(AgentId a) { bits_ &= ~(std::uint64_t{1} << a); }
  constexpr bool contains(AgentId a) const { return a < 64 && ((bits_ >> a) & 1u) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool intersects(AgentSet o) const { return (bits_ & o.bits_) != 0; }
  constexpr bool operator==(const AgentSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

struct AgentSpec {
  std::size_t class_index = 0;
  Cell start{};
  Cell goal{};
};

// Metadata retained for serialization of grid-backed instances.
struct InstanceOrigin {
  std::string map_path;
  std::uint64_t seed = 0;
  std::vector<AgentClass> classes;
  std::vector<Cell> node_cells;
  std::vector<AgentSpec> agents;
};

// Min-max mHPP instance. Immutable after construction.
class MhppInstance {
 public:
  // Matrix-backed instance. `class_costs[k]` is a symmetric matrix over all
  // N + 2 Na location ids; `agent_class[i]` selects agent i's matrix.
  // Throws std::invalid_argument on inconsistent sizes, empty A(v),
  // asymmetric matrices, or more than kMaxAgents agents.
  MhppInstance(std::size_t num_targets, std::vector<std::size_t> agent_class,
               std::vector<AgentSet> assign, std::vector<CostMatrix> class_costs);

  // Grid-backed instance: costs are octile shortest paths per class.
  static MhppInstance from_grid(const TerrainGrid& grid, std::vector<AgentClass> classes,
                                std::vector<Cell> node_cells, std::vector<AgentSet> assign,
                                std::vector<AgentSpec> agents, std::string map_path = {},
                                std::uint64_t seed = 0);

  std::size_t num_targets() const noexcept { return num_targets_; }
  std::size_t num_agents() const noexcept { return agent_class_.size(); }
  std::size_t num_locations() const noexcept { return num_targets_ + 2 * agent_class_.size(); }

  LocationId start_location(AgentId a) const noexcept {
    return static_cast<LocationId>(num_targets_ + a);
  }
  LocationId goal_location(AgentId a) const noexcept {
    return static_cast<LocationId>(num_targets_ + num_agents() + a);
  }
  bool is_target(LocationId v) const noexcept { return v < num_targets_; }

  const AgentSet& capable(LocationId target) const { return assign_.at(target); }
  bool can_serve(AgentId a, LocationId target) const { return assign_.at(target).contains(a); }
  AgentSet all_agents() const { return AgentSet::all(num_agents()); }

  std::size_t agent_class(AgentId a) const { return agent_class_.at(a); }
  std::size_t num_classes() const noexcept { return class_costs_.size(); }
  const CostMatrix& class_costs(std::size_t k) const { return class_costs_.at(k); }

  // c^a(u, v): infinite if either endpoint is a target agent a cannot serve.
  Cost cost(AgentId a, LocationId u, LocationId v) const noexcept {
    if ((is_target(u) && !assign_[u].contains(a)) || (is_target(v) && !assign_[v].contains(a)))
      return kInfiniteCost;
    return class_costs_[agent_class_[a]](u, v);
  }
  // min over all agents of c^i(u, v).
  Cost min_cost(LocationId u, LocationId v) const noexcept { return min_costs_(u, v); }

  const std::optional<InstanceOrigin>& origin() const noexcept { return origin_; }

 private:
  std::size_t num_targets_;
  std::vector<std::size_t> agent_class_;
  std::vector<AgentSet> assign_;
  std::vector<CostMatrix> class_costs_;
  CostMatrix min_costs_;
  std::optional<InstanceOrigin> origin_;
};

// Per-agent ordered location ids, start first and goal last.
struct Solution {
  std::vector<std::vector<LocationId>> paths;
  Cost makespan = kInfiniteCost;
  Cost total = kInfiniteCost;
};

Cost path_cost(const MhppInstance& inst, AgentId a, const std::vector<LocationId>& path);

// Recompute makespan and total from the instance costs.
void evaluate(const MhppInstance& inst, Solution& sol);

// Solution where every agent goes straight from start to goal.
Solution empty_solution(const MhppInstance& inst);

enum class Violation {
  AgentCount,
  Endpoint,
  UnknownLocation,
  NodeRepeated,
  NodeUnvisited,
  AssignmentViolated,
  InfiniteCost,
};

std::string_view violation_name(Violation v) noexcept;

struct ValidationResult {
  std::optional<Violation> violation;
  std::string message;
  Cost makespan = kInfiniteCost;
  Cost total = kInfiniteCost;

  bool ok() const noexcept { return !violation.has_value(); }
};

ValidationResult validate_solution(const MhppInstance& inst, const Solution& sol);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FleetSpec {
  std::vector<AgentClass> classes;
  std::vector<std::size_t> counts;  // agents per class, in class order
};

// Default two-class fleet.
FleetSpec gv_av_fleet(std::size_t gv, std::size_t av);

struct GenerationOptions {
  bool return_to_start = true;
  int max_retries = 16;
};

// Normal nodes come from Ground (capable: every class that drives on Ground);
// the rest come from Swamp/Water (capable: classes passing that terrain).
// normal = ceil(2n/3). Deterministic for a fixed seed.
MhppInstance generate_random_instance(const TerrainGrid& grid, std::size_t n_nodes,
                                      const FleetSpec& fleet, std::uint64_t seed,
                                      const GenerationOptions& opts = {},
                                      std::string map_path = {});

std::size_t normal_node_count(std::size_t n_nodes) noexcept;

// JSON instance documents. Cost matrices are recomputed on load.
std::string instance_to_json(const MhppInstance& inst);
// `base_dir` resolves a relative map path.
MhppInstance instance_from_json(const std::string& text, const std::string& base_dir = {});
void save_instance(const MhppInstance& inst, const std::string& path);
MhppInstance load_instance(const std::string& path);

}  // namespace mhpp
