#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcmapf {

using Time = int;
using VertexId = int;

// Sentinel for unbounded interval ends and unreachable distances. Strictly
// larger than any search horizon the solvers accept.
inline constexpr Time kInfinity = 1 << 29;

inline constexpr VertexId kNoVertex = -1;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

class GridMap {
 public:
  GridMap(int width, int height, std::vector<uint8_t> blocked);

  // Map file: `height H`, `width W`, then H rows of W chars ('.' free, '@' obstacle).
  static GridMap parse(std::string_view text);
  static GridMap load(const std::string& path);

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  bool is_free(Cell c) const { return in_bounds(c) && !blocked_[index(c)]; }
  int free_count() const;

  std::string to_string() const;

 private:
  int index(Cell c) const { return c.row * width_ + c.col; }

  int width_;
  int height_;
  std::vector<uint8_t> blocked_;
};

// 4-connected graph over the free cells. Vertex ids are dense and follow
// row-major order of the free cells.
class MotionGraph {
 public:
  explicit MotionGraph(GridMap map);

  const GridMap& map() const { return map_; }
  int size() const { return static_cast<int>(cells_.size()); }
  Cell cell(VertexId v) const { return cells_[v]; }
  // kNoVertex for obstacles and out-of-bounds cells.
  VertexId vertex_at(Cell c) const;
  std::span<const VertexId> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  bool adjacent(VertexId u, VertexId v) const;

 private:
  GridMap map_;
  std::vector<Cell> cells_;
  std::vector<VertexId> id_of_cell_;
  std::vector<int> offsets_;
  std::vector<VertexId> adjacency_;
};

class DistanceTable {
 public:
  // All-pairs shortest path lengths by Floyd-Warshall on unit edge costs.
  static DistanceTable compute(const MotionGraph& graph);

  int size() const { return n_; }
  Time at(VertexId u, VertexId v) const { return dist_[static_cast<size_t>(u) * n_ + v]; }
  bool reachable(VertexId u, VertexId v) const { return at(u, v) < kInfinity; }

 private:
  int n_ = 0;
  std::vector<Time> dist_;
};

struct Move {
  VertexId from = kNoVertex;
  VertexId to = kNoVertex;
};

// Two agents at the same vertex collide unless they carry out the same task.
inline bool is_vertex_collision(VertexId a, VertexId b, bool same_task) {
  return a == b && !same_task;
}

// Swap over one edge during the same step.
inline bool is_edge_collision(Move a, Move b, bool same_task) {
  return a.from != a.to && a.from == b.to && a.to == b.from && !same_task;
}

}  // namespace pcmapf
