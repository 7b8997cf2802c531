#include "pcmapf/hcbs.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <tuple>

#include "pcmapf/lowlevel.hpp"
#include "pcmapf/pccbs.hpp"

namespace pcmapf {

SlackTable compute_slack(const Problem& problem, const TaskGraph& graph, const IntervalTable& intervals) {
  const DistanceTable& dist = problem.distances();
  SlackTable out;
  std::vector<Time> park_finish(problem.agent_count());
  for (int a = 0; a < problem.agent_count(); ++a)
    park_finish[a] = collision_free_estimate(problem, graph, intervals, a);
  out.makespan = park_finish.empty() ? 0 : *std::max_element(park_finish.begin(), park_finish.end());

  std::vector<Time> latest_finish(graph.size(), out.makespan);
  for (int a = 0; a < problem.agent_count(); ++a) {
    const auto& allot = problem.allotments[a];
    if (allot.empty()) continue;
    int last = allot.back();
    int carry = graph.carry_node(last);
    latest_finish[carry] = std::min(latest_finish[carry],
                                    out.makespan - dist.at(problem.tasks[last].delivery, problem.agents[a].park));
  }
  out.latest_start.assign(graph.size(), 0);
  auto order = graph.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int id = *it;
    for (int succ : graph.successors(id)) latest_finish[id] = std::min(latest_finish[id], out.latest_start[succ]);
    out.latest_start[id] = latest_finish[id] - graph.node(id).min_cost;
  }
  out.node.resize(graph.size());
  for (int id = 0; id < graph.size(); ++id) out.node[id] = out.latest_start[id] - intervals[id].start.min_time;
  for (int a = 0; a < problem.agent_count(); ++a) out.park.push_back(out.makespan - park_finish[a]);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;
using Positions = std::vector<VertexId>;
// (segment, start vertex, start time, hold) -> planned positions, nullptr when infeasible.
using SegmentStore = std::map<std::tuple<int, VertexId, Time, Time>, std::shared_ptr<const Positions>>;

struct HNode {
  ConstraintSet constraints;
  SegmentStore store;
  std::vector<AgentPath> paths;
  Time cost = 0;
  int conflicts = 0;
  uint64_t id = 0;
};

struct HNodeOrder {
  bool operator()(const std::shared_ptr<HNode>& a, const std::shared_ptr<HNode>& b) const {
    if (a->cost != b->cost) return a->cost > b->cost;
    if (a->conflicts != b->conflicts) return a->conflicts > b->conflicts;
    return a->id > b->id;
  }
};

class Hcbs {
 public:
  Hcbs(const Problem& problem, const HcbsOptions& options)
      : problem_(problem), options_(options), started_(Clock::now()) {
    deadline_ = started_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(options.timeout_seconds));
  }

  SolveResult run() {
    SolveResult result;
    result.algorithm = "h-cbs";
    result.status = search(result);
    result.stats = stats_;
    result.stats.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started_).count();
    return result;
  }

 private:
  bool timed_out() const { return Clock::now() > deadline_; }
  int park_segment(int agent) const { return graph_.size() + agent; }

  SolveStatus search(SolveResult& result) {
    try {
      graph_ = TaskGraph::build(problem_);
      intervals_ = initialize_intervals(graph_);
    } catch (const InfeasibleProblem&) {
      return SolveStatus::Infeasible;
    }
    for (const auto& n : intervals_)
      if (n.start.empty() || n.end.empty()) return SolveStatus::Infeasible;
    slack_ = compute_slack(problem_, graph_, intervals_);
    horizon_ = problem_.horizon();

    auto root = std::make_shared<HNode>();
    auto paths = isps(root->constraints, root->store);
    if (!paths) return timed_out() ? SolveStatus::Timeout : SolveStatus::Infeasible;
    root->paths = std::move(*paths);
    push(std::move(root));

    while (!open_.empty()) {
      if (timed_out()) return SolveStatus::Timeout;
      if (options_.max_ct_nodes && stats_.ct_nodes >= options_.max_ct_nodes) return SolveStatus::Timeout;
      auto node = open_.top();
      open_.pop();
      auto conflict = detect_collision_conflict(problem_, node->paths);
      if (!conflict) {
        result.solution = Solution{node->paths};
        return SolveStatus::Solved;
      }
      // A move over t -> t+1 belongs to the segment that owns t+1.
      Time owned_at = conflict->edge ? conflict->time + 1 : conflict->time;
      for (int side = 0; side < 2; ++side) {
        int agent = side == 0 ? conflict->first : conflict->second;
        int seg = segment_owning(node->paths[agent], owned_at);
        auto child = std::make_shared<HNode>();
        child->constraints = node->constraints;
        if (!conflict->edge) {
          child->constraints.add_vertex(seg, conflict->v, conflict->time);
        } else if (side == 0) {
          child->constraints.add_edge(seg, conflict->v, conflict->u, conflict->time);
        } else {
          child->constraints.add_edge(seg, conflict->u, conflict->v, conflict->time);
        }
        for (const auto& [key, plan] : node->store)
          if (std::get<0>(key) != seg) child->store.emplace(key, plan);
        auto child_paths = isps(child->constraints, child->store);
        if (!child_paths) {
          if (timed_out()) return SolveStatus::Timeout;
          continue;
        }
        child->paths = std::move(*child_paths);
        push(std::move(child));
      }
    }
    return timed_out() ? SolveStatus::Timeout : SolveStatus::Exhausted;
  }

  int segment_owning(const AgentPath& path, Time t) const {
    const auto& allot = problem_.allotments[path.agent];
    for (size_t k = 0; k < allot.size(); ++k) {
      if (t <= path.events[k].pickup) return graph_.go_node(path.agent, static_cast<int>(k));
      if (t <= path.events[k].delivery) return graph_.carry_node(allot[k]);
    }
    return park_segment(path.agent);
  }

  std::shared_ptr<const Positions> segment(const ConstraintSet& cs, SegmentStore& store, int seg, VertexId from,
                                           Time t0, VertexId to, Time hold) {
    auto key = std::make_tuple(seg, from, t0, hold);
    if (auto it = store.find(key); it != store.end()) return it->second;
    LowLevelRequest req;
    req.constraint_owner = seg;
    req.start = from;
    req.start_time = t0;
    req.goal = to;
    req.goal_not_before = t0;
    req.hold_until = hold;
    req.max_time = horizon_;
    req.mode = HeuristicMode::FValue;
    req.deadline = deadline_;
    auto res = plan_path(req, cs, empty_table_, problem_, &stats_.ll_expansions);
    std::shared_ptr<const Positions> plan;
    if (res) plan = std::make_shared<const Positions>(std::move(res->positions));
    store.emplace(key, plan);
    return plan;
  }

  bool hold_free(const ConstraintSet& cs, int seg, VertexId v, Time from, Time until) const {
    for (const auto& c : cs.vertex_constraints())
      if (c.owner == seg && c.vertex == v && c.time > from && c.time <= until) return false;
    return true;
  }

  // Incremental slack-prioritized scheduling of every segment under `cs`.
  std::optional<std::vector<AgentPath>> isps(const ConstraintSet& cs, SegmentStore& store) {
    const int G = graph_.size();
    struct GoPlan {
      VertexId from = kNoVertex;
      Time start = 0;
      std::shared_ptr<const Positions> plan;
      Time arrival() const { return start + static_cast<Time>(plan->size()) - 1; }
    };
    std::vector<GoPlan> go(G);
    std::vector<Time> carry_start(problem_.task_count()), carry_end(problem_.task_count());
    std::vector<std::shared_ptr<const Positions>> carry(problem_.task_count());

    std::vector<int> waiting(G);
    std::set<std::pair<Time, int>> ready;
    for (int id = 0; id < G; ++id) {
      waiting[id] = static_cast<int>(graph_.predecessors(id).size());
      if (waiting[id] == 0) ready.emplace(slack_.node[id], id);
    }
    while (!ready.empty()) {
      int id = ready.begin()->second;
      ready.erase(ready.begin());
      const TaskNode& n = graph_.node(id);
      if (n.kind == NodeKind::Go) {
        int k = problem_.allotment_index(n.agent, n.task);
        GoPlan& g = go[id];
        if (k == 0) {
          g.from = problem_.agents[n.agent].start;
          g.start = 0;
        } else {
          int prev = problem_.allotments[n.agent][k - 1];
          g.from = problem_.tasks[prev].delivery;
          g.start = carry_end[prev];
        }
        g.plan = segment(cs, store, id, g.from, g.start, n.end, kNoHold);
        if (!g.plan) return std::nullopt;
      } else {
        const Task& task = problem_.tasks[n.task];
        Time s = 0;
        for (int pred : graph_.predecessors(id))
          s = std::max(s, graph_.node(pred).kind == NodeKind::Go ? go[pred].arrival() : carry_end[graph_.node(pred).task]);
        // Members wait at the pickup until the carry starts; a waiting member
        // that hits a constraint re-plans its approach to arrive later.
        for (;; ++s) {
          if (s > horizon_ || timed_out()) return std::nullopt;
          bool ok = true;
          for (int m : task.coalition) {
            int gid = graph_.go_node(m, problem_.allotment_index(m, n.task));
            GoPlan& g = go[gid];
            if (hold_free(cs, gid, task.pickup, g.arrival(), s)) continue;
            auto replanned = segment(cs, store, gid, g.from, g.start, task.pickup, s);
            if (!replanned) {
              ok = false;
              break;
            }
            g.plan = replanned;
          }
          if (ok) break;
        }
        auto plan = segment(cs, store, id, task.pickup, s, task.delivery, kNoHold);
        if (!plan) return std::nullopt;
        carry[n.task] = plan;
        carry_start[n.task] = s;
        carry_end[n.task] = s + static_cast<Time>(plan->size()) - 1;
      }
      for (int succ : graph_.successors(id))
        if (--waiting[succ] == 0) ready.emplace(slack_.node[succ], succ);
    }

    std::vector<AgentPath> paths(problem_.agent_count());
    for (int a = 0; a < problem_.agent_count(); ++a) {
      AgentPath& path = paths[a];
      path.agent = a;
      path.positions.push_back(problem_.agents[a].start);
      auto append = [&](const Positions& seg) { path.positions.insert(path.positions.end(), seg.begin() + 1, seg.end()); };
      const auto& allot = problem_.allotments[a];
      for (size_t k = 0; k < allot.size(); ++k) {
        int t = allot[k];
        append(*go[graph_.go_node(a, static_cast<int>(k))].plan);
        while (path.arrival() < carry_start[t]) path.positions.push_back(path.positions.back());
        append(*carry[t]);
        path.events.push_back({carry_start[t], carry_end[t]});
      }
      auto park = segment(cs, store, park_segment(a), path.positions.back(), path.arrival(),
                          problem_.agents[a].park, kInfinity);
      if (!park) return std::nullopt;
      append(*park);
    }
    return paths;
  }

  void push(std::shared_ptr<HNode> node) {
    node->cost = 0;
    for (const auto& p : node->paths) node->cost = std::max(node->cost, p.arrival());
    node->conflicts = count_collisions(problem_, node->paths);
    node->id = stats_.ct_nodes++;
    open_.push(std::move(node));
  }

  const Problem& problem_;
  HcbsOptions options_;
  Clock::time_point started_;
  Clock::time_point deadline_;
  TaskGraph graph_;
  IntervalTable intervals_;
  SlackTable slack_;
  Time horizon_ = 0;
  ConflictAvoidanceTable empty_table_;
  SolveStats stats_;
  std::priority_queue<std::shared_ptr<HNode>, std::vector<std::shared_ptr<HNode>>, HNodeOrder> open_;
};

}  // namespace

SolveResult solve_hcbs(const Problem& problem, const HcbsOptions& options) {
  return Hcbs(problem, options).run();
}

}  // namespace pcmapf
