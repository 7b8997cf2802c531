#include "pcmapf/gridworld.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pcmapf {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

int parse_header(std::string_view line, std::string_view key, int line_no) {
  if (line.substr(0, key.size()) != key || line.size() <= key.size() || line[key.size()] != ' ')
    throw ParseError(line_no, "expected '" + std::string(key) + " <n>'");
  std::string_view num = line.substr(key.size() + 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
  if (ec != std::errc() || ptr != num.data() + num.size() || value < 1)
    throw ParseError(line_no, "bad " + std::string(key) + " value '" + std::string(num) + "'");
  return value;
}

}  // namespace

GridMap::GridMap(int width, int height, std::vector<uint8_t> blocked)
    : width_(width), height_(height), blocked_(std::move(blocked)) {
  if (width_ < 1 || height_ < 1) throw std::invalid_argument("map dimensions must be positive");
  if (blocked_.size() != static_cast<size_t>(width_) * height_)
    throw std::invalid_argument("cell count does not match dimensions");
  if (free_count() == 0) throw std::invalid_argument("map has no free cell");
}

GridMap GridMap::parse(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.size() < 2) throw ParseError(static_cast<int>(lines.size()) + 1, "missing header");
  int height = parse_header(lines[0], "height", 1);
  int width = parse_header(lines[1], "width", 2);
  std::vector<uint8_t> blocked;
  blocked.reserve(static_cast<size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    int line_no = r + 3;
    if (static_cast<size_t>(r + 2) >= lines.size()) throw ParseError(line_no, "missing map row");
    std::string_view row = lines[r + 2];
    if (static_cast<int>(row.size()) != width)
      throw ParseError(line_no, "row has " + std::to_string(row.size()) + " cells, expected " +
                                    std::to_string(width));
    for (char ch : row) {
      if (ch == '.')
        blocked.push_back(0);
      else if (ch == '@')
        blocked.push_back(1);
      else
        throw ParseError(line_no, std::string("unknown cell character '") + ch + "'");
    }
  }
  for (size_t i = height + 2; i < lines.size(); ++i)
    if (!lines[i].empty()) throw ParseError(static_cast<int>(i) + 1, "trailing content after map");
  try {
    return GridMap(width, height, std::move(blocked));
  } catch (const std::invalid_argument& e) {
    throw ParseError(height + 2, e.what());
  }
}

GridMap GridMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

int GridMap::free_count() const {
  return static_cast<int>(std::count(blocked_.begin(), blocked_.end(), 0));
}

std::string GridMap::to_string() const {
  std::string out = "height " + std::to_string(height_) + "\nwidth " + std::to_string(width_) + "\n";
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) out.push_back(blocked_[r * width_ + c] ? '@' : '.');
    out.push_back('\n');
  }
  return out;
}

MotionGraph::MotionGraph(GridMap map) : map_(std::move(map)) {
  id_of_cell_.assign(static_cast<size_t>(map_.width()) * map_.height(), kNoVertex);
  for (int r = 0; r < map_.height(); ++r)
    for (int c = 0; c < map_.width(); ++c)
      if (map_.is_free({r, c})) {
        id_of_cell_[r * map_.width() + c] = static_cast<VertexId>(cells_.size());
        cells_.push_back({r, c});
      }

  static constexpr int kDr[] = {-1, 0, 0, 1};
  static constexpr int kDc[] = {0, -1, 1, 0};
  offsets_.reserve(cells_.size() + 1);
  offsets_.push_back(0);
  for (Cell c : cells_) {
    for (int k = 0; k < 4; ++k) {
      VertexId n = vertex_at({c.row + kDr[k], c.col + kDc[k]});
      if (n != kNoVertex) adjacency_.push_back(n);
    }
    offsets_.push_back(static_cast<int>(adjacency_.size()));
  }
}

VertexId MotionGraph::vertex_at(Cell c) const {
  if (!map_.in_bounds(c)) return kNoVertex;
  return id_of_cell_[c.row * map_.width() + c.col];
}

bool MotionGraph::adjacent(VertexId u, VertexId v) const {
  auto n = neighbors(u);
  return std::find(n.begin(), n.end(), v) != n.end();
}

DistanceTable DistanceTable::compute(const MotionGraph& graph) {
  DistanceTable table;
  const int n = graph.size();
  table.n_ = n;
  table.dist_.assign(static_cast<size_t>(n) * n, kInfinity);
  auto d = [&](int i, int j) -> Time& { return table.dist_[static_cast<size_t>(i) * n + j]; };
  for (int v = 0; v < n; ++v) {
    d(v, v) = 0;
    for (VertexId u : graph.neighbors(v)) d(v, u) = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) {
      Time ik = d(i, k);
      if (ik >= kInfinity) continue;
      Time* row = &table.dist_[static_cast<size_t>(i) * n];
      const Time* krow = &table.dist_[static_cast<size_t>(k) * n];
      for (int j = 0; j < n; ++j) {
        Time through = ik + krow[j];
        if (through < row[j]) row[j] = through;
      }
    }
  return table;
}

}  // namespace pcmapf
