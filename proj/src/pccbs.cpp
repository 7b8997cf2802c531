#include "pcmapf/pccbs.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <queue>

namespace pcmapf {

namespace {

using Clock = std::chrono::steady_clock;

TaskEvent event_of(const Problem& problem, std::span<const AgentPath> paths, int agent, int task) {
  int k = problem.allotment_index(agent, task);
  return paths[agent].events[k];
}

}  // namespace

Time observed_start(const Problem& problem, const TaskGraph& graph, std::span<const AgentPath> paths, int node) {
  const TaskNode& n = graph.node(node);
  if (n.kind == NodeKind::Go) {
    int k = problem.allotment_index(n.agent, n.task);
    return k == 0 ? 0 : paths[n.agent].events[k - 1].delivery;
  }
  Time t = kInfinity;
  for (int m : problem.tasks[n.task].coalition) t = std::min(t, event_of(problem, paths, m, n.task).pickup);
  return t;
}

Time observed_end(const Problem& problem, const TaskGraph& graph, std::span<const AgentPath> paths, int node) {
  const TaskNode& n = graph.node(node);
  if (n.kind == NodeKind::Go) return event_of(problem, paths, n.agent, n.task).pickup;
  Time t = 0;
  for (int m : problem.tasks[n.task].coalition) t = std::max(t, event_of(problem, paths, m, n.task).delivery);
  return t;
}

std::optional<PrecedenceConflict> detect_precedence_conflict(const Problem& problem, const TaskGraph& graph,
                                                             std::span<const AgentPath> paths) {
  for (int id : graph.topological_order()) {
    Time start = observed_start(problem, graph, paths, id);
    PrecedenceConflict c;
    c.node = id;
    c.observed = start;
    for (int pred : graph.predecessors(id)) {
      Time end = observed_end(problem, graph, paths, pred);
      if (end > start) c.violating_times.push_back(end);
    }
    if (!c.violating_times.empty()) return c;

    const TaskNode& n = graph.node(id);
    if (n.kind != NodeKind::Carry) continue;
    std::vector<Time> deliveries;
    for (int m : problem.tasks[n.task].coalition) deliveries.push_back(event_of(problem, paths, m, n.task).delivery);
    auto [lo, hi] = std::minmax_element(deliveries.begin(), deliveries.end());
    if (*lo != *hi) {
      c.kind = PrecedenceConflict::Kind::EndMismatch;
      c.observed = *lo;
      c.violating_times = deliveries;
      return c;
    }
  }
  return std::nullopt;
}

std::array<Interval, 2> split_interval(Interval old, Time split_time) {
  Time s = std::min(split_time, old.max_time);
  return {Interval{old.min_time, s - 1}, Interval{s, old.max_time}};
}

IntervalSplit resolve_precedence_conflict(const IntervalTable& intervals, const PrecedenceConflict& conflict,
                                          SplitRule rule) {
  IntervalSplit out;
  out.node = conflict.node;
  out.start_side = conflict.kind == PrecedenceConflict::Kind::StartViolation;
  Time s = rule == SplitRule::MinPlusOne
               ? conflict.observed + 1
               : *std::max_element(conflict.violating_times.begin(), conflict.violating_times.end());
  const NodeIntervals& iv = intervals[conflict.node];
  out.children = split_interval(out.start_side ? iv.start : iv.end, s);
  return out;
}

std::optional<DesyncConflict> detect_desync_conflict(const Problem& problem, std::span<const AgentPath> paths) {
  std::optional<DesyncConflict> best;
  for (int task = 0; task < problem.task_count(); ++task) {
    const auto& co = problem.tasks[task].coalition;
    if (co.size() < 2) continue;
    TaskEvent ev = event_of(problem, paths, co[0], task);
    for (Time t = ev.pickup + 1; t <= ev.delivery; ++t) {
      if (best && t >= best->time) break;
      VertexId lead = paths[co[0]].at(t);
      for (size_t i = 1; i < co.size(); ++i) {
        VertexId other = paths[co[i]].at(t);
        if (other != lead) {
          best = DesyncConflict{task, co[0], co[i], lead, other, t};
          break;
        }
      }
      if (best && best->task == task) break;
    }
  }
  return best;
}

namespace {

// Calls visit(conflict) for every collision in time order; stops when it
// returns false.
template <typename Visit>
void for_each_collision(const Problem& problem, std::span<const AgentPath> paths, Visit visit) {
  const int n = static_cast<int>(paths.size());
  Time horizon = 0;
  for (const auto& p : paths) horizon = std::max(horizon, p.arrival());
  // One step past the last arrival: agents resting together after a shared
  // delivery are no longer exempt.
  ++horizon;
  for (Time t = 0; t <= horizon; ++t) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        bool same = executing_same_task(problem, paths[a], paths[b], t);
        if (is_vertex_collision(paths[a].at(t), paths[b].at(t), same)) {
          if (!visit(CollisionConflict{a, b, false, paths[a].at(t), kNoVertex, t})) return;
        }
      }
    if (t == horizon) break;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        Move ma{paths[a].at(t), paths[a].at(t + 1)};
        Move mb{paths[b].at(t), paths[b].at(t + 1)};
        bool same = executing_same_task(problem, paths[a], paths[b], t) &&
                    executing_same_task(problem, paths[a], paths[b], t + 1);
        if (is_edge_collision(ma, mb, same)) {
          if (!visit(CollisionConflict{a, b, true, ma.from, ma.to, t})) return;
        }
      }
  }
}

}  // namespace

std::optional<CollisionConflict> detect_collision_conflict(const Problem& problem, std::span<const AgentPath> paths) {
  std::optional<CollisionConflict> found;
  for_each_collision(problem, paths, [&](const CollisionConflict& c) {
    found = c;
    return false;
  });
  return found;
}

int count_collisions(const Problem& problem, std::span<const AgentPath> paths) {
  int count = 0;
  for_each_collision(problem, paths, [&](const CollisionConflict&) {
    ++count;
    return true;
  });
  return count;
}

std::array<ConstraintSet, 2> resolve_collision_conflict(const ConstraintSet& parent, const CollisionConflict& c) {
  std::array<ConstraintSet, 2> out{parent, parent};
  if (c.edge) {
    out[0].add_edge(c.first, c.v, c.u, c.time);
    out[1].add_edge(c.second, c.u, c.v, c.time);
  } else {
    out[0].add_vertex(c.first, c.v, c.time);
    out[1].add_vertex(c.second, c.v, c.time);
  }
  return out;
}

std::vector<int> replan_priority(std::span<const int> agents, std::span<const Time> estimates) {
  std::vector<int> order(agents.begin(), agents.end());
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (estimates[a] != estimates[b]) return estimates[a] > estimates[b];
    return a < b;
  });
  return order;
}

Time collision_free_estimate(const Problem& problem, const TaskGraph& graph, const IntervalTable& intervals,
                             int agent) {
  const auto& allot = problem.allotments[agent];
  const DistanceTable& dist = problem.distances();
  if (allot.empty()) return dist.at(problem.agents[agent].start, problem.agents[agent].park);
  int last = allot.back();
  return intervals[graph.carry_node(last)].end.min_time +
         dist.at(problem.tasks[last].delivery, problem.agents[agent].park);
}

namespace {

struct NodeOrder {
  bool operator()(const std::shared_ptr<CtNode>& a, const std::shared_ptr<CtNode>& b) const {
    if (a->cost != b->cost) return a->cost > b->cost;
    if (a->conflicts != b->conflicts) return a->conflicts > b->conflicts;
    return a->id > b->id;
  }
};

class PcCbs {
 public:
  PcCbs(const Problem& problem, const PcCbsOptions& options)
      : problem_(problem), options_(options), started_(Clock::now()) {
    deadline_ = started_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(options.timeout_seconds));
  }

  SolveResult run() {
    SolveResult result;
    result.algorithm = "pc-cbs";
    result.status = search(result);
    result.stats = stats_;
    result.stats.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started_).count();
    return result;
  }

 private:
  bool timed_out() const { return Clock::now() > deadline_; }

  SolveStatus search(SolveResult& result) {
    try {
      graph_ = TaskGraph::build(problem_);
      root_intervals_ = initialize_intervals(graph_);
    } catch (const InfeasibleProblem&) {
      return SolveStatus::Infeasible;
    }
    for (const auto& n : root_intervals_)
      if (n.start.empty() || n.end.empty()) return SolveStatus::Infeasible;

    auto root = std::make_shared<CtNode>();
    root->intervals = root_intervals_;
    root->paths.resize(problem_.agent_count());
    std::vector<Time> estimates(problem_.agent_count());
    for (int a = 0; a < problem_.agent_count(); ++a)
      estimates[a] = collision_free_estimate(problem_, graph_, root_intervals_, a);
    root_floor_ = estimates.empty() ? 0 : *std::max_element(estimates.begin(), estimates.end());
    std::vector<int> everyone(problem_.agent_count());
    std::iota(everyone.begin(), everyone.end(), 0);
    if (!replan(*root, everyone, estimates)) return timed_out() ? SolveStatus::Timeout : SolveStatus::Infeasible;
    root_floor_ = 0;
    push(std::move(root));

    while (!open_.empty()) {
      if (timed_out()) return SolveStatus::Timeout;
      if (options_.max_ct_nodes && stats_.ct_nodes >= options_.max_ct_nodes) return SolveStatus::Timeout;
      std::shared_ptr<CtNode> node = open_.top();
      open_.pop();

      if (auto pc = detect_precedence_conflict(problem_, graph_, node->paths)) {
        expand_precedence(*node, *pc);
        continue;
      }
      if (auto dc = detect_desync_conflict(problem_, node->paths)) {
        ConstraintSet a = node->constraints, b = node->constraints;
        a.add_vertex(dc->first, dc->first_at, dc->time);
        b.add_vertex(dc->second, dc->second_at, dc->time);
        expand_constrained(*node, std::move(a), dc->first);
        expand_constrained(*node, std::move(b), dc->second);
        continue;
      }
      if (auto cc = detect_collision_conflict(problem_, node->paths)) {
        auto children = resolve_collision_conflict(node->constraints, *cc);
        expand_constrained(*node, std::move(children[0]), cc->first);
        expand_constrained(*node, std::move(children[1]), cc->second);
        continue;
      }
      result.solution = Solution{node->paths};
      return SolveStatus::Solved;
    }
    return timed_out() ? SolveStatus::Timeout : SolveStatus::Exhausted;
  }

  void expand_precedence(const CtNode& parent, const PrecedenceConflict& conflict) {
    IntervalSplit split = resolve_precedence_conflict(parent.intervals, conflict, options_.split_rule);
    for (const Interval& piece : split.children) {
      if (piece.empty()) continue;
      auto child = std::make_shared<CtNode>();
      child->constraints = parent.constraints;
      child->intervals = parent.intervals;
      child->paths = parent.paths;
      NodeIntervals& target = child->intervals[split.node];
      (split.start_side ? target.start : target.end) = piece;
      if (!update_intervals(graph_, child->intervals).feasible) continue;

      std::vector<bool> affected(problem_.agent_count(), false);
      for (int id = 0; id < graph_.size(); ++id)
        if (child->intervals[id] != parent.intervals[id])
          for (int a : graph_.owners(problem_, id)) affected[a] = true;
      std::vector<int> agents;
      for (int a = 0; a < problem_.agent_count(); ++a)
        if (affected[a]) agents.push_back(a);
      if (replan(*child, agents, arrivals(parent))) push(std::move(child));
    }
  }

  void expand_constrained(const CtNode& parent, ConstraintSet constraints, int agent) {
    auto child = std::make_shared<CtNode>();
    child->constraints = std::move(constraints);
    child->intervals = parent.intervals;
    child->paths = parent.paths;
    std::vector<int> agents{agent};
    if (replan(*child, agents, arrivals(parent))) push(std::move(child));
  }

  static std::vector<Time> arrivals(const CtNode& node) {
    std::vector<Time> out;
    for (const auto& p : node.paths) out.push_back(p.arrival());
    return out;
  }

  bool replan(CtNode& node, std::span<const int> agents, std::span<const Time> estimates) {
    for (int a : replan_priority(agents, estimates)) {
      Time bound = root_floor_;
      for (const auto& p : node.paths)
        if (p.agent != a && !p.positions.empty()) bound = std::max(bound, p.arrival());
      auto path = plan_agent_path(problem_, graph_, node.intervals, node.constraints, node.paths, a, bound,
                                  &stats_.ll_expansions, deadline_);
      if (!path) return false;
      node.paths[a] = std::move(*path);
    }
    return true;
  }

  void push(std::shared_ptr<CtNode> node) {
    node->cost = 0;
    for (const auto& p : node->paths) node->cost = std::max(node->cost, p.arrival());
    node->conflicts = count_collisions(problem_, node->paths);
    node->id = stats_.ct_nodes++;
    open_.push(std::move(node));
  }

  const Problem& problem_;
  PcCbsOptions options_;
  Clock::time_point started_;
  Clock::time_point deadline_;
  TaskGraph graph_;
  IntervalTable root_intervals_;
  Time root_floor_ = 0;
  SolveStats stats_;
  std::priority_queue<std::shared_ptr<CtNode>, std::vector<std::shared_ptr<CtNode>>, NodeOrder> open_;
};

}  // namespace

SolveResult solve_pccbs(const Problem& problem, const PcCbsOptions& options) {
  return PcCbs(problem, options).run();
}

}  // namespace pcmapf
