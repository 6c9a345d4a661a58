#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <istream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mhpp {

// Scaled integer cost: 1000 per cardinal grid step, 1414 per diagonal step.
using Cost = std::int64_t;
inline constexpr Cost kInfiniteCost = std::numeric_limits<Cost>::max();
inline constexpr Cost kCardinalStep = 1000;
inline constexpr Cost kDiagonalStep = 1414;

// Saturating addition; infinity absorbs.
constexpr Cost add_cost(Cost a, Cost b) noexcept {
  if (a == kInfiniteCost || b == kInfiniteCost) return kInfiniteCost;
  if (a > kInfiniteCost - b) return kInfiniteCost;
  return a + b;
}

enum class Terrain : std::uint8_t { Ground = 0, Tree, Swamp, Water, Obstacle };
inline constexpr int kTerrainCount = 5;

char terrain_char(Terrain t) noexcept;
std::string_view terrain_name(Terrain t) noexcept;

// Bit set over Terrain values.
class TerrainSet {
 public:
  constexpr TerrainSet() = default;
  constexpr TerrainSet(std::initializer_list<Terrain> ts) {
    for (auto t : ts) insert(t);
  }
  constexpr void insert(Terrain t) { bits_ |= bit(t); }
  constexpr void erase(Terrain t) { bits_ &= static_cast<std::uint8_t>(~bit(t)); }
  constexpr bool contains(Terrain t) const { return (bits_ & bit(t)) != 0; }
  constexpr bool subset_of(TerrainSet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool operator==(const TerrainSet&) const = default;

 private:
  static constexpr std::uint8_t bit(Terrain t) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t));
  }
  std::uint8_t bits_ = 0;
};

struct Cell {
  int x = 0;
  int y = 0;
  constexpr bool operator==(const Cell&) const = default;
};

// Agent capability: terrain the class can occupy, plus its exploration priority.
struct AgentClass {
  std::string name;
  TerrainSet passable;
  int priority = 0;

  // Throws std::invalid_argument if Obstacle is listed as passable.
  AgentClass(std::string name, TerrainSet passable, int priority);
};

// Default fleet: ground vehicles drive on Ground only; aerial vehicles also
// cover Swamp and Water. Tree blocks both.
AgentClass ground_vehicle_class();
AgentClass aerial_vehicle_class();

class MapParseError : public std::runtime_error {
 public:
  enum class Kind { Format, Dimension, Content };
  MapParseError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class TerrainGrid {
 public:
  TerrainGrid(int width, int height, std::vector<Terrain> cells);
  TerrainGrid(int width, int height, Terrain fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return cells_.size(); }

  bool in_bounds(Cell c) const noexcept {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t idx) const noexcept {
    return {static_cast<int>(idx % static_cast<std::size_t>(width_)),
            static_cast<int>(idx / static_cast<std::size_t>(width_))};
  }

  // Bounds-checked; throws std::out_of_range.
  Terrain at(Cell c) const;
  void set(Cell c, Terrain t);

  const std::vector<Terrain>& cells() const noexcept { return cells_; }

 private:
  int width_;
  int height_;
  std::vector<Terrain> cells_;
};

// MovingAI `.map` reader/writer.
TerrainGrid parse_map(std::istream& in);
TerrainGrid parse_map(std::string_view text);
TerrainGrid load_map_file(const std::string& path);
std::string format_map(const TerrainGrid& grid);

// Throws std::out_of_range when c is outside the grid.
bool traversable(const TerrainGrid& grid, Cell c, const AgentClass& k);

// The eight moves in a fixed order: cardinals first, then diagonals.
struct GridMove {
  int dx;
  int dy;
  Cost cost;
};
inline constexpr GridMove kGridMoves[8] = {
    {1, 0, kCardinalStep},  {-1, 0, kCardinalStep}, {0, 1, kCardinalStep},
    {0, -1, kCardinalStep}, {1, 1, kDiagonalStep},  {1, -1, kDiagonalStep},
    {-1, 1, kDiagonalStep}, {-1, -1, kDiagonalStep}};

// Single-source Dijkstra over an abstract width x height 8-connected grid.
// `passable(idx)` decides occupancy. Diagonal moves need both orthogonal
// corner cells passable. Unreached cells keep kInfiniteCost. Ties in the
// queue resolve by cell index, so parents are deterministic.
struct DistanceField {
  std::vector<Cost> dist;
  std::vector<std::int32_t> parent;  // -1 at source and at unreached cells
};

template <class Passable>
DistanceField grid_dijkstra(int width, int height, std::size_t source,
                            Passable&& passable) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  DistanceField field{std::vector<Cost>(n, kInfiniteCost), std::vector<std::int32_t>(n, -1)};
  if (source >= n || !passable(source)) return field;
  using Entry = std::pair<Cost, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<char> closed(n, 0);
  field.dist[source] = 0;
  queue.push({0, source});
  while (!queue.empty()) {
    auto [d, idx] = queue.top();
    queue.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    const int x = static_cast<int>(idx % static_cast<std::size_t>(width));
    const int y = static_cast<int>(idx / static_cast<std::size_t>(width));
    for (const auto& m : kGridMoves) {
      const int nx = x + m.dx;
      const int ny = y + m.dy;
      if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
      const std::size_t nidx = static_cast<std::size_t>(ny) * static_cast<std::size_t>(width) +
                               static_cast<std::size_t>(nx);
      if (closed[nidx] || !passable(nidx)) continue;
      if (m.dx != 0 && m.dy != 0) {
        const std::size_t side_a = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(nx);
        const std::size_t side_b = static_cast<std::size_t>(ny) * static_cast<std::size_t>(width) +
                                   static_cast<std::size_t>(x);
        if (!passable(side_a) || !passable(side_b)) continue;
      }
      const Cost nd = d + m.cost;
      if (nd < field.dist[nidx]) {
        field.dist[nidx] = nd;
        field.parent[nidx] = static_cast<std::int32_t>(idx);
        queue.push({nd, nidx});
      }
    }
  }
  return field;
}

// Cell sequence from the field's source to `target` (inclusive); empty if unreached.
std::vector<Cell> extract_path(const TerrainGrid& grid, const DistanceField& field, Cell target);

DistanceField class_distance_field(const TerrainGrid& grid, Cell source, const AgentClass& k);

// Returns kInfiniteCost when no path exists or either endpoint is blocked for k.
// Throws std::out_of_range for out-of-bounds cells.
Cost shortest_path_cost(const TerrainGrid& grid, Cell from, Cell to, const AgentClass& k);

// Dense symmetric matrix of pairwise costs.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n, Cost fill = kInfiniteCost) : n_(n), data_(n * n, fill) {}
  std::size_t size() const noexcept { return n_; }
  Cost operator()(std::size_t u, std::size_t v) const noexcept { return data_[u * n_ + v]; }
  Cost& operator()(std::size_t u, std::size_t v) noexcept { return data_[u * n_ + v]; }
  bool symmetric() const noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<Cost> data_;
};

// One Dijkstra per (class, source node). Result is indexed [class][u][v].
// Throws std::invalid_argument on duplicate nodes, std::out_of_range on bad cells.
std::vector<CostMatrix> build_cost_matrices(const TerrainGrid& grid, const std::vector<Cell>& nodes,
                                            const std::vector<AgentClass>& classes);

}  // namespace mhpp
