#include "pcmapf/lowlevel.hpp"

#include <algorithm>
#include <queue>
#include <unordered_set>

namespace pcmapf {

namespace {

uint64_t vt_key(VertexId v, Time t) { return (static_cast<uint64_t>(static_cast<uint32_t>(t)) << 32) | static_cast<uint32_t>(v); }

uint64_t edge_key(VertexId from, VertexId to, Time t) {
  return (static_cast<uint64_t>(static_cast<uint32_t>(t)) << 40) ^ (static_cast<uint64_t>(from) << 20) ^
         static_cast<uint64_t>(to);
}

bool is_member(const Problem& problem, int agent, int task) {
  const auto& co = problem.tasks[task].coalition;
  return std::binary_search(co.begin(), co.end(), agent);
}

}  // namespace

bool ConstraintSet::forbids_vertex(int owner, VertexId v, Time t) const {
  return std::any_of(vertex_.begin(), vertex_.end(), [&](const VertexConstraint& c) {
    return c.owner == owner && c.vertex == v && c.time == t;
  });
}

bool ConstraintSet::forbids_edge(int owner, VertexId from, VertexId to, Time t) const {
  return std::any_of(edge_.begin(), edge_.end(), [&](const EdgeConstraint& c) {
    return c.owner == owner && c.from == from && c.to == to && c.time == t;
  });
}

ConflictAvoidanceTable::ConflictAvoidanceTable(const Problem& problem, std::span<const AgentPath> paths, int self)
    : problem_(&problem), self_(self) {
  slot_of_agent_.assign(problem.agent_count(), -1);
  parked_at_.resize(problem.graph().size());
  visits_.resize(problem.graph().size());
  for (const AgentPath& p : paths) {
    if (p.agent == self || p.agent < 0 || p.positions.empty()) continue;
    int slot = static_cast<int>(paths_.size());
    paths_.push_back(&p);
    slot_of_agent_[p.agent] = slot;
    for (Time t = 0; t <= p.arrival(); ++t) {
      occupancy_[vt_key(p.positions[t], t)].push_back(slot);
      visits_[p.positions[t]].push_back(t);
    }
    parked_at_[p.positions.back()].push_back(slot);
  }
  for (auto& v : visits_) std::sort(v.begin(), v.end());
}

VertexId ConflictAvoidanceTable::position(int slot, Time t) const { return paths_[slot]->at(t); }

int ConflictAvoidanceTable::vertex_conflicts(VertexId v, Time t, int own_task) const {
  if (paths_.empty()) return 0;
  auto exempt = [&](int slot) {
    if (own_task < 0) return false;
    const AgentPath& o = *paths_[slot];
    int k = problem_->allotment_index(o.agent, own_task);
    if (k < 0 || k >= static_cast<int>(o.events.size())) return false;
    return o.events[k].pickup <= t && t <= o.events[k].delivery;
  };
  int count = 0;
  if (auto it = occupancy_.find(vt_key(v, t)); it != occupancy_.end())
    for (int slot : it->second)
      if (!exempt(slot)) ++count;
  for (int slot : parked_at_[v])
    if (paths_[slot]->arrival() < t && !exempt(slot)) ++count;
  return count;
}

int ConflictAvoidanceTable::edge_conflicts(VertexId from, VertexId to, Time t) const {
  if (from == to || paths_.empty()) return 0;
  int count = 0;
  if (auto it = occupancy_.find(vt_key(to, t)); it != occupancy_.end())
    for (int slot : it->second)
      if (position(slot, t + 1) == from) ++count;
  return count;
}

int ConflictAvoidanceTable::conflicts_after(VertexId v, Time t) const {
  if (paths_.empty()) return 0;
  const auto& times = visits_[v];
  int count = static_cast<int>(times.end() - std::upper_bound(times.begin(), times.end(), t));
  count += static_cast<int>(parked_at_[v].size());
  return count;
}

int ConflictAvoidanceTable::pickup_conflicts(int task, Time t) const {
  if (paths_.empty()) return 0;
  int count = 0;
  for (int m : problem_->tasks[task].coalition) {
    int slot = slot_of_agent_[m];
    if (slot < 0) continue;
    int k = problem_->allotment_index(m, task);
    const auto& ev = paths_[slot]->events;
    if (k < static_cast<int>(ev.size()) && ev[k].pickup != t) ++count;
  }
  for (auto [pred, succ] : problem_->edges) {
    if (succ != task || is_member(*problem_, self_, pred)) continue;
    Time latest = -1;
    for (int m : problem_->tasks[pred].coalition) {
      int slot = slot_of_agent_[m];
      if (slot < 0) continue;
      int k = problem_->allotment_index(m, pred);
      const auto& ev = paths_[slot]->events;
      if (k < static_cast<int>(ev.size())) latest = std::max(latest, ev[k].delivery);
    }
    if (latest > t) ++count;
  }
  return count;
}

int ConflictAvoidanceTable::delivery_conflicts(int task, Time t) const {
  if (paths_.empty()) return 0;
  int count = 0;
  for (int m : problem_->tasks[task].coalition) {
    int slot = slot_of_agent_[m];
    if (slot < 0) continue;
    int k = problem_->allotment_index(m, task);
    const auto& ev = paths_[slot]->events;
    if (k < static_cast<int>(ev.size()) && ev[k].delivery != t) ++count;
  }
  for (auto [pred, succ] : problem_->edges) {
    if (pred != task || is_member(*problem_, self_, succ)) continue;
    Time earliest = kInfinity;
    for (int m : problem_->tasks[succ].coalition) {
      int slot = slot_of_agent_[m];
      if (slot < 0) continue;
      int k = problem_->allotment_index(m, succ);
      const auto& ev = paths_[slot]->events;
      if (k < static_cast<int>(ev.size())) earliest = std::min(earliest, ev[k].pickup);
    }
    if (earliest < t) ++count;
  }
  return count;
}

int ConflictAvoidanceTable::carry_desync(int task, VertexId v, Time t) const {
  if (paths_.empty()) return 0;
  int count = 0;
  for (int m : problem_->tasks[task].coalition) {
    int slot = slot_of_agent_[m];
    if (slot >= 0 && position(slot, t) != v) ++count;
  }
  return count;
}

Time cost_to_go(VertexId position, int reached, std::span<const Waypoint> waypoints, VertexId goal,
                const DistanceTable& dist) {
  Time total = 0;
  VertexId at = position;
  for (size_t i = reached; i < waypoints.size(); ++i) {
    Time d = dist.at(at, waypoints[i].vertex);
    if (d >= kInfinity) return kInfinity;
    total += d;
    at = waypoints[i].vertex;
  }
  Time d = dist.at(at, goal);
  return d >= kInfinity ? kInfinity : total + d;
}

namespace {

// Incremental pieces of the tuple, shared by the search and heuristic_tuple().
struct TupleBuilder {
  const LowLevelRequest& req;
  const ConflictAvoidanceTable& others;
  const DistanceTable& dist;
  bool cascade() const { return req.mode == HeuristicMode::Cascade; }

  // Task being carried while `reached` waypoints are done, -1 if none.
  int carried_task(int reached) const {
    if (reached < static_cast<int>(req.waypoints.size()) && !req.waypoints[reached].pickup)
      return req.waypoints[reached].task;
    return -1;
  }

  int step_c2(int reached, VertexId to, Time t) const {
    if (!cascade()) return 0;
    int task = carried_task(reached);
    return task < 0 ? 0 : others.carry_desync(task, to, t);
  }

  int step_c3(int reached, VertexId from, VertexId to, Time t_from) const {
    if (!cascade()) return 0;
    return others.vertex_conflicts(to, t_from + 1, carried_task(reached)) +
           others.edge_conflicts(from, to, t_from);
  }

  int event_c2(int index, Time t) const {
    if (!cascade()) return 0;
    const Waypoint& wp = req.waypoints[index];
    return wp.pickup ? others.pickup_conflicts(wp.task, t) : others.delivery_conflicts(wp.task, t);
  }

  HeuristicTuple tuple(VertexId v, Time t, int reached, int moves, int c2, int c3) const {
    Time h = cost_to_go(v, reached, req.waypoints, req.goal, dist);
    HeuristicTuple out;
    out.c6 = t + h;
    if (!cascade()) return out;
    out.c1 = std::max(t + h - req.makespan_bound, 0);
    out.c2 = c2;
    out.c3 = c3;
    out.c4 = moves + h;
    out.c5 = h;
    return out;
  }
};

}  // namespace

HeuristicTuple heuristic_tuple(const LowLevelRequest& request, const ConflictAvoidanceTable& others,
                               const DistanceTable& dist, std::span<const VertexId> prefix,
                               std::span<const Time> event_times) {
  TupleBuilder tb{request, others, dist};
  int reached = 0, moves = 0, c2 = 0, c3 = 0;
  Time t = request.start_time;
  auto fire_events = [&](Time now) {
    while (reached < static_cast<int>(event_times.size()) && event_times[reached] == now) {
      c2 += tb.event_c2(reached, now);
      ++reached;
    }
  };
  fire_events(t);
  for (size_t i = 1; i < prefix.size(); ++i) {
    if (prefix[i] != prefix[i - 1]) ++moves;
    c3 += tb.step_c3(reached, prefix[i - 1], prefix[i], t);
    c2 += tb.step_c2(reached, prefix[i], t + 1);
    ++t;
    fire_events(t);
  }
  return tb.tuple(prefix.empty() ? request.start : prefix.back(), t, reached, moves, c2, c3);
}

namespace {

struct SearchNode {
  VertexId v;
  Time t;
  int reached;
  bool terminal;
  int parent;
  int moves;
  HeuristicTuple h;
};

struct OpenEntry {
  HeuristicTuple h;
  Time t;
  int reached;
  VertexId v;
  int node;
  // priority_queue pops the largest; invert so the best entry is "largest".
  bool operator<(const OpenEntry& o) const {
    if (h != o.h) return h > o.h;
    if (t != o.t) return t < o.t;
    if (reached != o.reached) return reached < o.reached;
    if (v != o.v) return v > o.v;
    return node > o.node;
  }
};

// Constraints of one owner, hashed for the inner loop.
struct OwnerConstraints {
  std::unordered_set<uint64_t> vertex;
  std::unordered_set<uint64_t> edge;
  std::unordered_map<VertexId, std::vector<Time>> times_at;

  OwnerConstraints(const ConstraintSet& set, int owner) {
    for (const auto& c : set.vertex_constraints())
      if (c.owner == owner) {
        vertex.insert(vt_key(c.vertex, c.time));
        times_at[c.vertex].push_back(c.time);
      }
    for (const auto& c : set.edge_constraints())
      if (c.owner == owner) edge.insert(edge_key(c.from, c.to, c.time));
  }
  bool vertex_banned(VertexId v, Time t) const { return !vertex.empty() && vertex.count(vt_key(v, t)); }
  bool edge_banned(VertexId from, VertexId to, Time t) const {
    return !edge.empty() && edge.count(edge_key(from, to, t));
  }
  // No constraint on v for any time in (from, until].
  bool free_during(VertexId v, Time from, Time until) const {
    auto it = times_at.find(v);
    if (it == times_at.end()) return true;
    return std::none_of(it->second.begin(), it->second.end(), [&](Time t) { return t > from && t <= until; });
  }
};

}  // namespace

std::optional<LowLevelResult> plan_path(const LowLevelRequest& req, const ConstraintSet& constraints,
                                        const ConflictAvoidanceTable& others, const Problem& problem,
                                        uint64_t* expansions) {
  const MotionGraph& graph = problem.graph();
  const DistanceTable& dist = problem.distances();
  const int W = static_cast<int>(req.waypoints.size());
  const uint64_t nv = static_cast<uint64_t>(graph.size());
  TupleBuilder tb{req, others, dist};
  OwnerConstraints bans(constraints, req.constraint_owner);

  // Earliest completion check through every remaining window.
  auto feasible = [&](VertexId v, Time t, int reached) {
    if (t > req.max_time) return false;
    Time tau = t;
    VertexId at = v;
    for (int i = reached; i < W; ++i) {
      const Waypoint& wp = req.waypoints[i];
      Time d = dist.at(at, wp.vertex);
      if (d >= kInfinity) return false;
      tau = std::max(tau + d, wp.window.min_time);
      if (tau > wp.window.max_time) return false;
      at = wp.vertex;
    }
    Time d = dist.at(at, req.goal);
    if (d >= kInfinity) return false;
    tau = std::max(tau + d, req.goal_not_before);
    if (req.hold_until != kNoHold && tau > req.hold_until) return false;
    return tau <= req.max_time;
  };

  auto state_key = [&](VertexId v, Time t, int reached, bool terminal) {
    return ((static_cast<uint64_t>(t) * (W + 1) + reached) * nv + v) * 2 + (terminal ? 1 : 0);
  };

  std::vector<SearchNode> nodes;
  std::unordered_map<uint64_t, int> best;
  std::priority_queue<OpenEntry> open;

  auto push = [&](SearchNode n) {
    uint64_t key = state_key(n.v, n.t, n.reached, n.terminal);
    auto it = best.find(key);
    if (it != best.end() && !(n.h < nodes[it->second].h)) return;
    int idx = static_cast<int>(nodes.size());
    nodes.push_back(n);
    best[key] = idx;
    open.push({n.h, n.t, n.reached, n.v, idx});
  };

  // Adds (v, t, reached) and every state reachable by firing the next
  // waypoint events at the same timestep.
  auto push_with_events = [&](VertexId v, Time t, int reached, int parent, int moves, int c2, int c3) {
    if (!feasible(v, t, reached)) return;
    push({v, t, reached, false, parent, moves, tb.tuple(v, t, reached, moves, c2, c3)});
    int parent_idx = static_cast<int>(nodes.size()) - 1;
    while (reached < W && v == req.waypoints[reached].vertex && req.waypoints[reached].window.contains(t)) {
      c2 += tb.event_c2(reached, t);
      ++reached;
      if (!feasible(v, t, reached)) return;
      // Parent is the pre-event node so reconstruction sees the event time.
      push({v, t, reached, false, parent_idx, moves, tb.tuple(v, t, reached, moves, c2, c3)});
      parent_idx = static_cast<int>(nodes.size()) - 1;
    }
  };

  if (req.start_time > req.max_time) return std::nullopt;
  push_with_events(req.start, req.start_time, 0, -1, 0, 0, 0);

  uint64_t expanded = 0;
  int found = -1;
  while (!open.empty()) {
    OpenEntry top = open.top();
    open.pop();
    const SearchNode cur = nodes[top.node];
    if (best[state_key(cur.v, cur.t, cur.reached, cur.terminal)] != top.node) continue;
    if (cur.terminal) {
      found = top.node;
      break;
    }
    ++expanded;
    if (req.deadline && (expanded & 1023) == 0 && std::chrono::steady_clock::now() > *req.deadline) break;

    const Time hold = req.hold_until == kNoHold ? cur.t : req.hold_until;
    if (cur.reached == W && cur.v == req.goal && cur.t >= req.goal_not_before && cur.t <= hold &&
        bans.free_during(cur.v, cur.t, hold)) {
      int c3 = cur.h.c3;
      if (req.hold_until >= kInfinity && tb.cascade()) c3 += others.conflicts_after(cur.v, cur.t);
      SearchNode term = cur;
      term.terminal = true;
      term.parent = top.node;
      term.h = tb.tuple(cur.v, cur.t, cur.reached, cur.moves, cur.h.c2, c3);
      push(term);
    }

    if (cur.t + 1 > req.max_time) continue;
    auto step = [&](VertexId to) {
      Time nt = cur.t + 1;
      if (bans.vertex_banned(to, nt)) return;
      if (to != cur.v && bans.edge_banned(cur.v, to, cur.t)) return;
      int c2 = cur.h.c2 + tb.step_c2(cur.reached, to, nt);
      int c3 = cur.h.c3 + tb.step_c3(cur.reached, cur.v, to, cur.t);
      push_with_events(to, nt, cur.reached, top.node, cur.moves + (to != cur.v ? 1 : 0), c2, c3);
    };
    step(cur.v);
    for (VertexId n : graph.neighbors(cur.v)) step(n);
  }
  if (expansions) *expansions += expanded;
  if (found < 0) return std::nullopt;

  LowLevelResult result;
  result.expansions = expanded;
  result.goal_tuple = nodes[found].h;
  result.event_times.assign(W, 0);
  std::vector<int> chain;
  for (int i = found; i >= 0; i = nodes[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  for (size_t i = 0; i < chain.size(); ++i) {
    const SearchNode& n = nodes[chain[i]];
    if (i == 0 || n.t != nodes[chain[i - 1]].t) result.positions.push_back(n.v);
    if (i > 0) {
      const SearchNode& prev = nodes[chain[i - 1]];
      for (int w = prev.reached; w < n.reached; ++w) result.event_times[w] = n.t;
    }
  }
  return result;
}

std::vector<Waypoint> agent_waypoints(const Problem& problem, const TaskGraph& graph,
                                      const IntervalTable& intervals, int agent) {
  std::vector<Waypoint> out;
  const auto& allot = problem.allotments[agent];
  for (size_t k = 0; k < allot.size(); ++k) {
    int task = allot[k];
    int go = graph.go_node(agent, static_cast<int>(k));
    int carry = graph.carry_node(task);
    Waypoint pickup;
    pickup.vertex = problem.tasks[task].pickup;
    pickup.window = intervals[go].end.intersect(intervals[carry].start);
    pickup.task = task;
    pickup.pickup = true;
    Waypoint delivery;
    delivery.vertex = problem.tasks[task].delivery;
    delivery.window = intervals[carry].end;
    if (k + 1 < allot.size())
      delivery.window = delivery.window.intersect(intervals[graph.go_node(agent, static_cast<int>(k + 1))].start);
    delivery.task = task;
    delivery.pickup = false;
    out.push_back(pickup);
    out.push_back(delivery);
  }
  return out;
}

std::optional<AgentPath> plan_agent_path(const Problem& problem, const TaskGraph& graph,
                                         const IntervalTable& intervals, const ConstraintSet& constraints,
                                         std::span<const AgentPath> other_plans, int agent,
                                         Time makespan_bound, uint64_t* expansions,
                                         std::optional<std::chrono::steady_clock::time_point> deadline) {
  if (!problem.allotments[agent].empty() &&
      !intervals[graph.go_node(agent, 0)].start.contains(0))
    return std::nullopt;
  LowLevelRequest req;
  req.agent = agent;
  req.constraint_owner = agent;
  req.start = problem.agents[agent].start;
  req.start_time = 0;
  req.waypoints = agent_waypoints(problem, graph, intervals, agent);
  req.goal = problem.agents[agent].park;
  req.hold_until = kInfinity;
  req.max_time = problem.horizon();
  req.makespan_bound = makespan_bound;
  req.mode = HeuristicMode::Cascade;
  req.deadline = deadline;
  ConflictAvoidanceTable table(problem, other_plans, agent);
  auto res = plan_path(req, constraints, table, problem, expansions);
  if (!res) return std::nullopt;
  AgentPath path;
  path.agent = agent;
  path.positions = std::move(res->positions);
  for (size_t k = 0; k < problem.allotments[agent].size(); ++k)
    path.events.push_back({res->event_times[2 * k], res->event_times[2 * k + 1]});
  return path;
}

}  // namespace pcmapf
