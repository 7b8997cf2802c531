#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "pcmapf/gridworld.hpp"

namespace pcmapf {

// Motion graph plus its distance table. Built once per map and shared
// read-only by every solver run on that map.
struct Environment {
  explicit Environment(GridMap map)
      : graph(std::move(map)), distances(DistanceTable::compute(graph)) {}

  MotionGraph graph;
  DistanceTable distances;
};

// Semantic problems with an instance (bad references, inconsistent
// allotments, cyclic precedence).
class InvalidProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AgentSpec {
  int id = 0;  // external id as written in problem files
  VertexId start = kNoVertex;
  VertexId park = kNoVertex;
};

struct Task {
  int id = 0;                  // external id
  std::vector<int> coalition;  // agent indices, ascending
  VertexId pickup = kNoVertex;
  VertexId delivery = kNoVertex;
};

// A PC-MAPF instance after task assignment. Agents and tasks are addressed by
// dense indices; `id` fields keep the external names for file output.
struct Problem {
  std::shared_ptr<const Environment> env;
  std::vector<AgentSpec> agents;
  std::vector<Task> tasks;
  std::vector<std::pair<int, int>> edges;   // task index A precedes task index B
  std::vector<std::vector<int>> allotments;  // per agent, ordered task indices

  int agent_count() const { return static_cast<int>(agents.size()); }
  int task_count() const { return static_cast<int>(tasks.size()); }
  const MotionGraph& graph() const { return env->graph; }
  const DistanceTable& distances() const { return env->distances; }

  // Position of task `task` inside agent's allotment, -1 when not allotted.
  int allotment_index(int agent, int task) const;
  int max_coalition_degree() const;
  // Bound on every timestep the solvers consider:
  // |V| * (tasks + 1) * (max coalition degree + 1).
  Time horizon() const;

  // Structural checks shared by the parser and the generator: coalition and
  // allotment consistency, distinct starts and parking vertices, acyclic
  // explicit edges.
  void check_consistency() const;
};

Problem parse_problem(std::shared_ptr<const Environment> env, std::string_view text);
Problem load_problem(std::shared_ptr<const Environment> env, const std::string& path);
std::string format_problem(const Problem& problem);

std::string read_file(const std::string& path);

}  // namespace pcmapf
