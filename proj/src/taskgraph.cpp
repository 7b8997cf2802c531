#include "pcmapf/taskgraph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace pcmapf {

namespace {

Time add_sat(Time t, Time d) { return t >= kInfinity || d >= kInfinity ? kInfinity : std::min(t + d, kInfinity); }
Time sub_sat(Time t, Time d) { return t >= kInfinity ? kInfinity : t - d; }

}  // namespace

std::vector<int> topological_sort(int node_count, std::span<const std::pair<int, int>> edges) {
  std::vector<std::vector<int>> succ(node_count);
  std::vector<int> indegree(node_count, 0);
  for (auto [u, v] : edges) {
    succ[u].push_back(v);
    ++indegree[v];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < node_count; ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<int> order;
  order.reserve(node_count);
  while (!ready.empty()) {
    int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (int v : succ[u])
      if (--indegree[v] == 0) ready.push(v);
  }
  if (static_cast<int>(order.size()) != node_count)
    throw InfeasibleProblem("precedence cycle in task graph");
  return order;
}

TaskGraph TaskGraph::build(const Problem& problem) {
  const DistanceTable& dist = problem.distances();
  TaskGraph g;
  g.go_of_agent_.resize(problem.agent_count());
  for (int a = 0; a < problem.agent_count(); ++a) {
    VertexId at = problem.agents[a].start;
    for (int t : problem.allotments[a]) {
      TaskNode n;
      n.kind = NodeKind::Go;
      n.task = t;
      n.agent = a;
      n.start = at;
      n.end = problem.tasks[t].pickup;
      n.min_cost = dist.at(n.start, n.end);
      g.go_of_agent_[a].push_back(static_cast<int>(g.nodes_.size()));
      g.nodes_.push_back(n);
      at = problem.tasks[t].delivery;
    }
  }
  g.carry_of_task_.resize(problem.task_count());
  for (int t = 0; t < problem.task_count(); ++t) {
    TaskNode n;
    n.kind = NodeKind::Carry;
    n.task = t;
    n.start = problem.tasks[t].pickup;
    n.end = problem.tasks[t].delivery;
    n.min_cost = dist.at(n.start, n.end);
    g.carry_of_task_[t] = static_cast<int>(g.nodes_.size());
    g.nodes_.push_back(n);
  }

  for (int a = 0; a < problem.agent_count(); ++a) {
    const auto& allot = problem.allotments[a];
    for (size_t k = 0; k < allot.size(); ++k) {
      int go = g.go_of_agent_[a][k];
      int carry = g.carry_of_task_[allot[k]];
      g.edges_.emplace_back(go, carry);
      if (k + 1 < allot.size()) g.edges_.emplace_back(carry, g.go_of_agent_[a][k + 1]);
    }
  }
  for (auto [ta, tb] : problem.edges) g.edges_.emplace_back(g.carry_of_task_[ta], g.carry_of_task_[tb]);
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  g.preds_.resize(g.nodes_.size());
  g.succs_.resize(g.nodes_.size());
  for (auto [u, v] : g.edges_) {
    g.succs_[u].push_back(v);
    g.preds_[v].push_back(u);
  }
  g.topo_ = topological_sort(g.size(), g.edges_);
  return g;
}

std::vector<int> TaskGraph::owners(const Problem& problem, int id) const {
  const TaskNode& n = nodes_[id];
  if (n.kind == NodeKind::Go) return {n.agent};
  return problem.tasks[n.task].coalition;
}

std::string TaskGraph::label(const Problem& problem, int id) const {
  const TaskNode& n = nodes_[id];
  if (n.kind == NodeKind::Carry) return "CARRY-" + std::to_string(problem.tasks[n.task].id);
  return "GO-" + std::to_string(problem.tasks[n.task].id) + "/agent-" +
         std::to_string(problem.agents[n.agent].id);
}

IntervalTable initialize_intervals(const TaskGraph& graph) {
  for (int i = 0; i < graph.size(); ++i)
    if (graph.node(i).min_cost >= kInfinity)
      throw InfeasibleProblem("task endpoint unreachable");
  IntervalTable table(graph.size());
  update_intervals(graph, table);
  return table;
}

PropagationOutcome update_intervals(const TaskGraph& graph, IntervalTable& iv) {
  PropagationOutcome out;
  bool changed = true;
  while (changed) {
    changed = false;
    ++out.sweeps;
    for (int id : graph.topological_order()) {
      NodeIntervals& n = iv[id];
      for (int pred : graph.predecessors(id)) {
        if (iv[pred].end.min_time > n.start.min_time) {
          n.start.min_time = iv[pred].end.min_time;
          changed = true;
        }
      }
      Time earliest_end = add_sat(n.start.min_time, graph.node(id).min_cost);
      if (earliest_end > n.end.min_time) {
        n.end.min_time = earliest_end;
        changed = true;
      }
    }
    auto order = graph.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int id = *it;
      NodeIntervals& n = iv[id];
      for (int succ : graph.successors(id)) {
        if (iv[succ].start.max_time < n.end.max_time) {
          n.end.max_time = iv[succ].start.max_time;
          changed = true;
        }
      }
      Time latest_start = sub_sat(n.end.max_time, graph.node(id).min_cost);
      if (latest_start < n.start.max_time) {
        n.start.max_time = latest_start;
        changed = true;
      }
    }
  }
  for (const auto& n : iv)
    if (n.start.empty() || n.end.empty()) out.feasible = false;
  return out;
}

}  // namespace pcmapf
