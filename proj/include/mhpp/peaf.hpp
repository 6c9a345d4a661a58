#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mhpp/instance.hpp"

namespace mhpp {

// Fixed-size bit vector over target indices.
class VisitedSet {
 public:
  VisitedSet() = default;
  explicit VisitedSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

  std::size_t capacity() const noexcept { return n_; }
  bool contains(std::size_t v) const noexcept { return (words_[v / 64] >> (v % 64)) & 1u; }
  void insert(std::size_t v) noexcept { words_[v / 64] |= std::uint64_t{1} << (v % 64); }
  std::size_t count() const noexcept;
  bool superset_of(const VisitedSet& o) const noexcept;
  bool full() const noexcept { return count() == n_; }
  bool operator==(const VisitedSet&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

inline constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;
inline constexpr AgentId kNoAgent = 0xFFFFFFFFu;

// Partial joint solution. An agent is active until its vertex is its goal location.
struct Label {
  std::vector<LocationId> vertex;
  std::vector<Cost> g;
  VisitedSet visited;
  std::uint32_t parent = kNoParent;
  AgentId moved = kNoAgent;

  Cost g_max = 0;
  Cost g_sum = 0;
  Cost h = 0;
  Cost f = 0;
  std::size_t visited_count = 0;
  bool h_pending = false;  // h not computed yet; f is then a weaker lower bound

  bool active(const MhppInstance& inst, AgentId a) const {
    return vertex[a] != inst.goal_location(a);
  }
};

Label initial_label(const MhppInstance& inst);

// Weak dominance: same joint vertex, element-wise g no greater, visited superset.
bool dominates(const Label& a, const Label& b);

// MST over unvisited targets plus the agents' current vertices contracted
// into one root, edge costs min over agents, divided (floor) by the number of
// active agents. kInfiniteCost when some target cannot be connected.
Cost mst_heuristic(const Label& l, const MhppInstance& inst);

// Recompute g_max, g_sum, h and f. `parent_f` applies pathmax so f never
// decreases along a parent chain. Without the heuristic, h is left at 0 and
// marked pending.
void update_estimates(Label& l, const MhppInstance& inst, Cost parent_f = 0, bool with_heuristic = true);

// Agent expanded next: active agent with smallest g, lowest id on ties.
// kNoAgent if no agent is active.
AgentId next_agent(const Label& l, const MhppInstance& inst);

// Partial expansion: successors move only next_agent(l). Parent links are
// left to the caller.
std::vector<Label> expand(const Label& l, const MhppInstance& inst, bool with_heuristic = true);

bool is_complete(const Label& l, const MhppInstance& inst);
bool is_feasible(const Label& l, const MhppInstance& inst);

struct PeafOptions {
  double eps0 = 0.5;
  double eps_decay = 0.5;
  double eps_floor = 1e-3;  // below this, eps becomes 0
  std::optional<std::chrono::milliseconds> time_limit;
  std::optional<std::size_t> expansion_limit;  // deterministic budget
  bool dominance_pruning = true;
  bool post_optimize = true;
  bool prefer_larger_f = true;  // focal middle key; false flips it
  bool stop_after_first = false;
  // Until the first incumbent exists, a phase that spends this many
  // expansions without completing doubles eps and starts over. Each incumbent
  // records the eps it was found at, so its (1 + eps) bound still holds.
  // Ignored when eps0 is 0.
  std::optional<std::size_t> escalate_after = 500;
  // Called for every label whose heuristic gets evaluated during the search.
  // The search defers a successor's heuristic until the label is popped.
  std::function<void(const Label&)> on_generate;
};

struct Incumbent {
  Cost makespan = 0;
  Cost total = 0;
  double at_ms = 0;
  double eps = 0;
};

struct SearchCounters {
  std::size_t generated = 0;
  std::size_t expanded = 0;
  std::size_t pruned_dominance = 0;
  std::size_t pruned_infeasible = 0;
  std::size_t pruned_bound = 0;
  std::size_t restarts = 0;
  std::size_t focal_violations = 0;
};

enum class SolveStatus {
  Optimal,     // exhaustion proved the incumbent optimal
  Feasible,    // budget ran out holding an incumbent
  Infeasible,  // exhaustion without any solution
  NoSolution,  // budget ran out before the first solution
};

std::string_view status_name(SolveStatus s) noexcept;

struct SolverReport {
  std::string algorithm;
  SolveStatus status = SolveStatus::NoSolution;
  std::vector<Incumbent> incumbents;
  std::optional<Solution> best;
  SearchCounters counters;
  std::vector<double> eps_trace;
  double elapsed_ms = 0;

  double time_to_best_ms() const { return incumbents.empty() ? 0.0 : incumbents.back().at_ms; }
};

// Anytime focal search with restarts and decaying eps.
SolverReport solve_peaf(const MhppInstance& inst, const PeafOptions& opts = {});

std::string report_to_json(const SolverReport& report);
// Throws nlohmann::json exceptions or std::invalid_argument on malformed input.
SolverReport report_from_json(const std::string& text);

}  // namespace mhpp
