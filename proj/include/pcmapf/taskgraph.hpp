#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcmapf/problem.hpp"

namespace pcmapf {

// Raised when an instance cannot have any solution (unreachable endpoint,
// precedence cycle through the allotments).
class InfeasibleProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind { Go, Carry };

struct TaskNode {
  NodeKind kind = NodeKind::Go;
  int task = -1;
  int agent = -1;  // owner of a GO node; -1 for CARRY (belongs to the coalition)
  VertexId start = kNoVertex;
  VertexId end = kNoVertex;
  Time min_cost = 0;  // collision-free duration start -> end
};

struct Interval {
  Time min_time = 0;
  Time max_time = kInfinity;

  bool empty() const { return min_time > max_time; }
  bool contains(Time t) const { return min_time <= t && t <= max_time; }
  Interval intersect(Interval other) const {
    return {std::max(min_time, other.min_time), std::min(max_time, other.max_time)};
  }
  bool operator==(const Interval&) const = default;
};

struct NodeIntervals {
  Interval start;
  Interval end;
  bool operator==(const NodeIntervals&) const = default;
};

using IntervalTable = std::vector<NodeIntervals>;

// Kahn's algorithm with the smallest ready node id first. Throws
// InfeasibleProblem on a cycle.
std::vector<int> topological_sort(int node_count, std::span<const std::pair<int, int>> edges);

class TaskGraph {
 public:
  // GO node per (agent, allotted task), one CARRY node per task, in-schedule
  // chains GO -> CARRY -> next GO, and explicit CARRY(a) -> CARRY(b) edges.
  static TaskGraph build(const Problem& problem);

  int size() const { return static_cast<int>(nodes_.size()); }
  const TaskNode& node(int id) const { return nodes_[id]; }
  std::span<const int> predecessors(int id) const { return preds_[id]; }
  std::span<const int> successors(int id) const { return succs_[id]; }
  std::span<const int> topological_order() const { return topo_; }
  std::span<const std::pair<int, int>> edges() const { return edges_; }

  int carry_node(int task) const { return carry_of_task_[task]; }
  int go_node(int agent, int k) const { return go_of_agent_[agent][k]; }
  // Agents whose paths depend on the node's intervals.
  std::vector<int> owners(const Problem& problem, int id) const;
  std::string label(const Problem& problem, int id) const;

 private:
  std::vector<TaskNode> nodes_;
  std::vector<std::vector<int>> preds_;
  std::vector<std::vector<int>> succs_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> topo_;
  std::vector<int> carry_of_task_;
  std::vector<std::vector<int>> go_of_agent_;
};

// All intervals start as [0, inf) and the forward pass raises the lower
// bounds to the collision-free earliest times.
IntervalTable initialize_intervals(const TaskGraph& graph);

struct PropagationOutcome {
  bool feasible = true;
  int sweeps = 0;  // forward+backward sweep pairs run until nothing changed
};

// Forward pass in topological order lifts minimum times from predecessors and
// through min-cost; backward pass lowers maximum times from successors.
// Reports infeasibility when an interval empties; the table is left
// propagated either way.
PropagationOutcome update_intervals(const TaskGraph& graph, IntervalTable& intervals);

}  // namespace pcmapf
