#include "mhpp/gridmap.hpp"

#include <fstream>
#include <sstream>

namespace mhpp {

char terrain_char(Terrain t) noexcept {
  switch (t) {
    case Terrain::Ground: return '.';
    case Terrain::Tree: return 'T';
    case Terrain::Swamp: return 'S';
    case Terrain::Water: return 'W';
    case Terrain::Obstacle: return '@';
  }
  return '?';
}

std::string_view terrain_name(Terrain t) noexcept {
  switch (t) {
    case Terrain::Ground: return "ground";
    case Terrain::Tree: return "tree";
    case Terrain::Swamp: return "swamp";
    case Terrain::Water: return "water";
    case Terrain::Obstacle: return "obstacle";
  }
  return "unknown";
}

AgentClass::AgentClass(std::string n, TerrainSet p, int prio)
    : name(std::move(n)), passable(p), priority(prio) {
  if (passable.contains(Terrain::Obstacle))
    throw std::invalid_argument("agent class '" + name + "' lists obstacle as passable");
}

AgentClass ground_vehicle_class() { return AgentClass("GV", {Terrain::Ground}, 1); }

AgentClass aerial_vehicle_class() {
  return AgentClass("AV", {Terrain::Ground, Terrain::Swamp, Terrain::Water}, 2);
}

TerrainGrid::TerrainGrid(int width, int height, std::vector<Terrain> cells)
    : width_(width), height_(height), cells_(std::move(cells)) {
  if (width < 1 || height < 1) throw std::invalid_argument("grid dimensions must be positive");
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("cell count does not match grid dimensions");
}

TerrainGrid::TerrainGrid(int width, int height, Terrain fill)
    : TerrainGrid(width, height,
                  std::vector<Terrain>(static_cast<std::size_t>(std::max(width, 0)) *
                                           static_cast<std::size_t>(std::max(height, 0)),
                                       fill)) {}

Terrain TerrainGrid::at(Cell c) const {
  if (!in_bounds(c))
    throw std::out_of_range("cell (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                            ") outside grid");
  return cells_[index(c)];
}

void TerrainGrid::set(Cell c, Terrain t) {
  if (!in_bounds(c)) throw std::out_of_range("cell outside grid");
  cells_[index(c)] = t;
}

namespace {

bool decode_terrain(char ch, Terrain& out) {
  switch (ch) {
    case '.':
    case 'G': out = Terrain::Ground; return true;
    case 'T': out = Terrain::Tree; return true;
    case 'S': out = Terrain::Swamp; return true;
    case 'W': out = Terrain::Water; return true;
    case '@':
    case 'O': out = Terrain::Obstacle; return true;
    default: return false;
  }
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

int parse_dimension(const std::string& line, std::string_view key) {
  const std::string prefix = std::string(key) + " ";
  if (line.rfind(prefix, 0) != 0)
    throw MapParseError(MapParseError::Kind::Format,
                        "expected '" + std::string(key) + " <n>', got '" + line + "'");
  const std::string digits = line.substr(prefix.size());
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw MapParseError(MapParseError::Kind::Format, "bad " + std::string(key) + " value '" + digits + "'");
  const long v = std::stol(digits);
  if (v < 1 || v > 1'000'000)
    throw MapParseError(MapParseError::Kind::Format, std::string(key) + " out of range");
  return static_cast<int>(v);
}

}  // namespace

TerrainGrid parse_map(std::istream& in) {
  std::string line;
  if (!read_line(in, line) || line != "type octile")
    throw MapParseError(MapParseError::Kind::Format, "missing 'type octile' header");
  if (!read_line(in, line)) throw MapParseError(MapParseError::Kind::Format, "missing height");
  const int height = parse_dimension(line, "height");
  if (!read_line(in, line)) throw MapParseError(MapParseError::Kind::Format, "missing width");
  const int width = parse_dimension(line, "width");
  if (!read_line(in, line) || line != "map")
    throw MapParseError(MapParseError::Kind::Format, "missing 'map' line");

  std::vector<Terrain> cells;
  cells.reserve(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y) {
    if (!read_line(in, line))
      throw MapParseError(MapParseError::Kind::Dimension,
                          "expected " + std::to_string(height) + " rows, got " + std::to_string(y));
    if (line.size() != static_cast<std::size_t>(width))
      throw MapParseError(MapParseError::Kind::Dimension,
                          "row " + std::to_string(y) + " has length " + std::to_string(line.size()) +
                              ", expected " + std::to_string(width));
    for (std::size_t x = 0; x < line.size(); ++x) {
      Terrain t{};
      if (!decode_terrain(line[x], t))
        throw MapParseError(MapParseError::Kind::Content,
                            std::string("unknown terrain character '") + line[x] + "' at (" +
                                std::to_string(x) + "," + std::to_string(y) + ")");
      cells.push_back(t);
    }
  }
  while (read_line(in, line)) {
    if (!line.empty())
      throw MapParseError(MapParseError::Kind::Dimension, "extra content after the last map row");
  }
  return TerrainGrid(width, height, std::move(cells));
}

TerrainGrid parse_map(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_map(in);
}

TerrainGrid load_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  return parse_map(in);
}

std::string format_map(const TerrainGrid& grid) {
  std::string out = "type octile\nheight " + std::to_string(grid.height()) + "\nwidth " +
                    std::to_string(grid.width()) + "\nmap\n";
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) out += terrain_char(grid.at({x, y}));
    out += '\n';
  }
  return out;
}

bool traversable(const TerrainGrid& grid, Cell c, const AgentClass& k) {
  return k.passable.contains(grid.at(c));
}

std::vector<Cell> extract_path(const TerrainGrid& grid, const DistanceField& field, Cell target) {
  std::vector<Cell> path;
  if (!grid.in_bounds(target)) return path;
  std::size_t idx = grid.index(target);
  if (idx >= field.dist.size() || field.dist[idx] == kInfiniteCost) return path;
  for (std::int32_t cur = static_cast<std::int32_t>(idx); cur >= 0;
       cur = field.parent[static_cast<std::size_t>(cur)])
    path.push_back(grid.cell_at(static_cast<std::size_t>(cur)));
  return {path.rbegin(), path.rend()};
}

DistanceField class_distance_field(const TerrainGrid& grid, Cell source, const AgentClass& k) {
  if (!grid.in_bounds(source)) throw std::out_of_range("source cell outside grid");
  const auto& cells = grid.cells();
  return grid_dijkstra(grid.width(), grid.height(), grid.index(source),
                       [&](std::size_t i) { return k.passable.contains(cells[i]); });
}

Cost shortest_path_cost(const TerrainGrid& grid, Cell from, Cell to, const AgentClass& k) {
  if (!grid.in_bounds(from) || !grid.in_bounds(to))
    throw std::out_of_range("path endpoint outside grid");
  if (!traversable(grid, from, k) || !traversable(grid, to, k)) return kInfiniteCost;
  if (from == to) return 0;
  return class_distance_field(grid, from, k).dist[grid.index(to)];
}

bool CostMatrix::symmetric() const noexcept {
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = u + 1; v < n_; ++v)
      if ((*this)(u, v) != (*this)(v, u)) return false;
  return true;
}

std::vector<CostMatrix> build_cost_matrices(const TerrainGrid& grid, const std::vector<Cell>& nodes,
                                            const std::vector<AgentClass>& classes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!grid.in_bounds(nodes[i])) throw std::out_of_range("node cell outside grid");
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i] == nodes[j]) throw std::invalid_argument("duplicate node cells");
  }
  std::vector<CostMatrix> out;
  out.reserve(classes.size());
  for (const auto& k : classes) {
    CostMatrix m(nodes.size());
    for (std::size_t u = 0; u < nodes.size(); ++u) {
      if (!traversable(grid, nodes[u], k)) continue;
      m(u, u) = 0;
      const auto field = class_distance_field(grid, nodes[u], k);
      for (std::size_t v = u + 1; v < nodes.size(); ++v) {
        const Cost c = field.dist[grid.index(nodes[v])];
        m(u, v) = c;
        m(v, u) = c;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace mhpp
