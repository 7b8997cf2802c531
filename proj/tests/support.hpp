#pragma once

#include <array>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pcmapf/bench.hpp"
#include "pcmapf/problem.hpp"

namespace pcmapf::fixtures {

inline std::shared_ptr<const Environment> make_env(const std::string& map_text) {
  return std::make_shared<const Environment>(GridMap::parse(map_text));
}

inline std::shared_ptr<const Environment> load_env(const std::string& path) {
  return std::make_shared<const Environment>(GridMap::load(path));
}

inline std::string map_dir() { return PCMAPF_MAP_DIR; }

inline const std::vector<std::string>& shipped_maps() {
  static const std::vector<std::string> names{"empty", "warehouse", "maze-gap", "maze-tunnel"};
  return names;
}

inline bool connected(const GridMap& map) {
  MotionGraph g(map);
  if (g.size() == 0) return false;
  std::vector<bool> seen(g.size(), false);
  std::vector<VertexId> stack{0};
  seen[0] = true;
  int count = 0;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    ++count;
    for (VertexId n : g.neighbors(v))
      if (!seen[n]) {
        seen[n] = true;
        stack.push_back(n);
      }
  }
  return count == g.size();
}

// Random connected grid of at most 5x5 with a few obstacles.
inline GridMap random_small_map(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> side(3, 5);
  std::bernoulli_distribution obstacle(0.15);
  for (;;) {
    int w = side(rng), h = side(rng);
    std::vector<uint8_t> blocked(static_cast<size_t>(w) * h);
    for (auto& b : blocked) b = obstacle(rng) ? 1 : 0;
    GridMap map(w, h, blocked);
    if (map.free_count() >= 7 && connected(map)) return map;
  }
}

inline std::shared_ptr<const Environment> empty9() {
  static const auto env = load_env(map_dir() + "/empty.map");
  return env;
}

// Agent 1 needs 2 steps to its pickup and 2 more to deliver; agent 2 reaches
// its pickup after 2 steps but task 2 must wait for task 1.
inline Problem relay_problem() {
  return parse_problem(empty9(),
                       "agent 1 start 0 0 park 0 4\n"
                       "agent 2 start 4 0 park 4 5\n"
                       "task 1 pickup 0 2 deliver 0 4 coalition 1\n"
                       "task 2 pickup 4 2 deliver 4 5 coalition 2\n"
                       "edge 1 2\n"
                       "allot 1 1\n"
                       "allot 2 2\n");
}

inline std::shared_ptr<const Environment> corridor_env() {
  static const auto env = load_env(map_dir() + "/corridor.map");
  return env;
}

inline Problem corridor_problem() { return load_problem(corridor_env(), map_dir() + "/instances/corridor.problem"); }

struct SmallInstanceSpec {
  int max_agents = 3;
  int max_tasks_per_agent = 2;
  std::vector<int> degrees{1, 2};
};

// Small random instance for oracle comparisons: random map, up to three
// agents, at most two tasks each.
inline Problem random_small_instance(uint64_t seed, const SmallInstanceSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  for (;;) {
    GridMap map = random_small_map(rng);
    GeneratorConfig cfg;
    cfg.env = std::make_shared<const Environment>(map);
    std::uniform_int_distribution<size_t> pick_degree(0, spec.degrees.size() - 1);
    cfg.coalition_degree = spec.degrees[pick_degree(rng)];
    std::uniform_int_distribution<int> agents(cfg.coalition_degree, spec.max_agents);
    cfg.agent_count = agents(rng);
    cfg.mean_tasks = std::uniform_int_distribution<int>(1, spec.max_tasks_per_agent)(rng);
    cfg.max_tasks_per_agent = spec.max_tasks_per_agent;
    cfg.mode = cfg.coalition_degree == 1 ? GeneratorMode::Assembly : GeneratorMode::Cmapd;
    cfg.explicit_edge_probability = 0.3;
    cfg.seed = rng();
    try {
      return generate_instance(cfg);
    } catch (const InvalidProblem&) {
      continue;
    }
  }
}

// Four agents around (4,4) that must pick up together at (4,4) and deliver at (4,5).
inline Problem four_way_coalition() {
  return parse_problem(empty9(),
                       "agent 1 start 0 4 park 0 0\n"
                       "agent 2 start 4 0 park 0 8\n"
                       "agent 3 start 8 4 park 8 0\n"
                       "agent 4 start 4 8 park 8 8\n"
                       "task 1 pickup 4 4 deliver 4 5 coalition 1 2 3 4\n"
                       "allot 1 1\nallot 2 1\nallot 3 1\nallot 4 1\n");
}

// Straight walk along `cells`, waiting at the last one until `until`.
inline std::vector<VertexId> walk(const Problem& p, std::vector<Cell> cells, Time until) {
  std::vector<VertexId> out;
  for (Cell c : cells) out.push_back(p.graph().vertex_at(c));
  while (static_cast<Time>(out.size()) - 1 < until) out.push_back(out.back());
  return out;
}

// Each member walks straight in, waits until its own pickup time, then steps
// onto the delivery cell.
inline std::vector<AgentPath> staggered_paths(const Problem& p, std::array<Time, 4> pickups) {
  std::vector<std::vector<Cell>> approach{
      {{0, 4}, {1, 4}, {2, 4}, {3, 4}, {4, 4}},
      {{4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4}},
      {{8, 4}, {7, 4}, {6, 4}, {5, 4}, {4, 4}},
      {{4, 8}, {4, 7}, {4, 6}, {4, 5}, {4, 4}},
  };
  std::vector<AgentPath> paths;
  for (int a = 0; a < 4; ++a) {
    AgentPath path{a, walk(p, approach[a], pickups[a]), {{pickups[a], pickups[a] + 1}}};
    path.positions.push_back(p.graph().vertex_at({4, 5}));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace pcmapf::fixtures
