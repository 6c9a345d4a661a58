#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mhpp/gridmap.hpp"
#include "mhpp/instance.hpp"

namespace mhpp::explore {

// Team map. Knowledge is monotone: a known cell never becomes unknown again.
class KnownGrid {
 public:
  KnownGrid(int width, int height)
      : width_(width), height_(height), state_(static_cast<std::size_t>(width) * height, kUnknown) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return state_.size(); }
  bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  std::size_t index(Cell c) const noexcept { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Cell cell_at(std::size_t i) const noexcept {
    return {static_cast<int>(i % width_), static_cast<int>(i / width_)};
  }

  bool known(std::size_t i) const noexcept { return state_[i] != kUnknown; }
  bool known(Cell c) const noexcept { return known(index(c)); }
  Terrain terrain(std::size_t i) const noexcept { return static_cast<Terrain>(state_[i]); }
  std::size_t known_count() const noexcept { return known_count_; }

  // Returns true if the cell was unknown before.
  bool reveal(std::size_t i, Terrain t) noexcept {
    if (known(i)) return false;
    state_[i] = static_cast<std::int8_t>(t);
    ++known_count_;
    return true;
  }

 private:
  static constexpr std::int8_t kUnknown = -1;
  int width_;
  int height_;
  std::vector<std::int8_t> state_;
  std::size_t known_count_ = 0;
};

struct RobotState {
  AgentId id = 0;
  std::size_t class_index = 0;
  Cell cell{};
  int priority = 0;
  std::vector<Cell> trace;
  Cost distance = 0;  // scaled cells: 1000 cardinal, 1414 diagonal

  std::optional<Cell> target;
  bool target_is_local = false;
};

struct Frontier {
  Cell cell{};
  AgentSet capable;
};

struct FrontierCluster {
  std::vector<std::size_t> members;  // indices into the frontier list, ascending
  Cell representative{};
  double hetero_fraction = 0;  // members whose capable set is not the whole team
};

// Square window of side 2R + 1 centred on a robot, clipped to the grid.
struct LocalWindow {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive bounds
  bool contains(Cell c) const noexcept { return c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1; }
};
LocalWindow local_window(Cell center, int radius, int width, int height);

// Reveal cells within Euclidean radius r that have line of sight. Obstacle and
// Tree cells stop a ray but are revealed themselves. Returns revealed indices.
std::vector<std::size_t> sense(const TerrainGrid& truth, KnownGrid& known, Cell at, int radius);

// Known cells 8-adjacent to unknown space that some class can occupy, row-major.
// `robot_classes` holds one entry per robot; `classes` may add classes with no
// robot in the team, whose frontiers then have an empty capable set.
std::vector<Frontier> detect_frontiers(const KnownGrid& known, const std::vector<AgentClass>& robot_classes,
                                       const std::vector<AgentClass>& classes = {});

// Leader clustering with Euclidean threshold `radius`. The
// representative minimizes the summed distance to the cluster's members
// (row-major first on ties). Clusters are ordered by their first member.
std::vector<FrontierCluster> cluster_frontiers(const std::vector<Frontier>& frontiers, double radius,
                                               AgentSet team);

// Share of members that are hetero-frontiers for `robot`: A(q) != team and robot in A(q).
double hetero_fraction_for(const FrontierCluster& cluster, const std::vector<Frontier>& frontiers,
                           AgentId robot, AgentSet team);

// Order of an open TSP path from vertex 0 visiting every vertex. Exact subset
// DP up to 10 vertices, nearest neighbour + 2-opt above.
std::vector<std::size_t> open_tsp_order(const CostMatrix& costs);

struct LocalCandidate {
  Cell representative{};
  double hetero_fraction = 0;  // robot-specific
};

struct LocalPlan {
  std::optional<std::size_t> first;  // index into the candidate list
  std::vector<std::size_t> order;    // candidate indices in tour order
  std::vector<Cell> path;            // grid path from the robot to the first candidate
  std::vector<Cost> adjusted_start_costs;
};

// Unknown cells are blocked for local edges. Start edges get
// max(c - alpha * p * c0, 0). Empty `first` when nothing is reachable.
LocalPlan local_plan(const KnownGrid& known, const AgentClass& cls, Cell robot_cell,
                     const std::vector<LocalCandidate>& candidates, double alpha, Cost c0);

struct OwnershipInput {
  Cell representative{};
  AgentSet capable;  // robots that can visit and reach the cluster
  bool hetero = false;
};

// Owner per cluster, or nullopt when no capable robot's window contains it.
std::vector<std::optional<AgentId>> priority_assign(const std::vector<RobotState>& robots,
                                                    const std::vector<OwnershipInput>& clusters,
                                                    int window_radius, int width, int height,
                                                    bool use_priority);

struct ExploreParams {
  int sense_radius = 7;
  int window_radius = 10;
  double cluster_radius = 3.0;
  double alpha = 0.6;
  std::optional<Cost> c0;  // default 2 * sense_radius * 1000
  int replan_period = 20;
  std::size_t tick_cap = 5000;
  bool priority_assignment = true;
  bool hetero_cost = true;
  std::size_t peaf_expansions = 2000;
  int start_jitter = 0;
  std::uint64_t seed = 0;

  Cost effective_c0() const { return c0 ? *c0 : Cost{2} * sense_radius * kCardinalStep; }
};

struct RobotConfig {
  std::size_t class_index = 0;
  Cell start{};
  std::optional<int> priority;  // defaults to the class priority
};

struct ExploreScenario {
  TerrainGrid map;
  std::string map_path;
  std::vector<AgentClass> classes;
  std::vector<RobotConfig> robots;
  ExploreParams params;
};

struct TraceRow {
  std::size_t tick = 0;
  AgentId robot = 0;
  Cell cell{};
  std::size_t known_cells = 0;
};

struct EpisodeMetrics {
  std::size_t ticks = 0;
  bool complete = false;  // false when the tick cap hit first
  std::vector<Cost> robot_distance;
  Cost total_distance = 0;
  std::vector<double> coverage;  // known fraction after each tick's sensing
  std::size_t unreachable_frontiers = 0;
  std::size_t global_replans = 0;
  std::vector<TraceRow> trace;
};

// Per-tick hooks for invariant checks.
struct TickView {
  std::size_t tick;
  const KnownGrid& known;
  const std::vector<RobotState>& robots;
  const std::vector<Frontier>& frontiers;
  const std::vector<FrontierCluster>& clusters;
  const std::vector<std::optional<AgentId>>& owners;
  const std::vector<OwnershipInput>& ownership;
};

class Simulator {
 public:
  explicit Simulator(const ExploreScenario& scenario);

  // Advance one tick. Returns false once exploration is finished.
  bool step();
  EpisodeMetrics run(const std::function<void(const TickView&)>& observer = {});

  const KnownGrid& known() const noexcept { return known_; }
  const std::vector<RobotState>& robots() const noexcept { return robots_; }
  std::size_t tick() const noexcept { return tick_; }
  bool finished() const noexcept { return finished_; }

  // Global allocation of the given clusters among the given robots; per robot
  // the waypoint it should head to. Uses the current tick's snapshot.
  struct GlobalAssignment {
    std::vector<std::optional<Cell>> waypoint;  // indexed by robot id
    std::optional<MhppInstance> instance;
    std::optional<Solution> solution;
    std::vector<std::size_t> node_clusters;  // instance target -> cluster index
  };
  GlobalAssignment global_plan(const std::vector<std::size_t>& cluster_ids,
                               const std::vector<AgentId>& agents) const;

  // Snapshot of the current tick (valid after refresh()).
  void refresh();
  const std::vector<Frontier>& frontiers() const noexcept { return frontiers_; }
  const std::vector<FrontierCluster>& clusters() const noexcept { return clusters_; }
  const std::vector<std::optional<AgentId>>& owners() const noexcept { return owners_; }
  const EpisodeMetrics& metrics() const noexcept { return metrics_; }

 private:
  void sense_all();
  DistanceField known_field(const RobotState& r) const;
  void plan();
  void move_robots();
  void record();

  const ExploreScenario& scenario_;
  KnownGrid known_;
  std::vector<AgentClass> robot_classes_;
  std::vector<RobotState> robots_;
  AgentSet team_;
  std::size_t tick_ = 0;
  bool finished_ = false;

  std::vector<Frontier> frontiers_;
  std::vector<char> frontier_mask_;
  std::vector<FrontierCluster> clusters_;
  std::vector<DistanceField> reach_;  // per robot, unknown space optimistically passable
  std::vector<std::vector<Cost>> class_reach_;  // per class, min over its robots
  std::vector<std::size_t> actionable_;  // frontier indices some capable robot can reach
  std::vector<std::vector<std::optional<Cell>>> class_reps_;  // [cluster][class]
  std::vector<OwnershipInput> ownership_;
  std::vector<std::optional<AgentId>> owners_;
  EpisodeMetrics metrics_;
  std::function<void(const TickView&)> observer_;
};

EpisodeMetrics run_episode(const ExploreScenario& scenario,
                           const std::function<void(const TickView&)>& observer = {});

// Scenario documents and episode outputs.
ExploreScenario scenario_from_json(const std::string& text, const std::string& base_dir = {});
ExploreScenario load_scenario(const std::string& path);
std::string metrics_to_json(const EpisodeMetrics& m);
// Everything but the trace, which lives in the CSV.
EpisodeMetrics metrics_from_json(const std::string& text);
std::string trace_to_csv(const EpisodeMetrics& m);

}  // namespace mhpp::explore
