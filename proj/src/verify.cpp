#include "pcmapf/verify.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace pcmapf {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::VertexCollision: return "vertex-collision";
    case ViolationKind::EdgeCollision: return "edge-collision";
    case ViolationKind::Precedence: return "precedence";
    case ViolationKind::CoalitionDesync: return "coalition-desync";
    case ViolationKind::Interval: return "interval";
    case ViolationKind::Parking: return "parking";
    case ViolationKind::Discontinuity: return "discontinuity";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& v : violations) out << to_string(v.kind) << " t=" << v.time << ": " << v.detail << "\n";
  return out.str();
}

namespace {

class Validator {
 public:
  Validator(const Problem& problem, const Solution& solution) : p_(problem), s_(solution) {}

  ValidationReport run() {
    if (static_cast<int>(s_.paths.size()) != p_.agent_count()) {
      add(ViolationKind::Discontinuity, 0, "solution has " + std::to_string(s_.paths.size()) + " paths for " +
                                               std::to_string(p_.agent_count()) + " agents");
      return finish();
    }
    events_ok_.assign(p_.agent_count(), false);
    for (int a = 0; a < p_.agent_count(); ++a) check_agent(a);
    check_coalitions();
    check_precedence();
    check_collisions();
    return finish();
  }

 private:
  std::string agent_name(int a) const { return "agent " + std::to_string(p_.agents[a].id); }
  std::string task_name(int t) const { return "task " + std::to_string(p_.tasks[t].id); }

  void add(ViolationKind kind, Time t, std::string detail) { report_.violations.push_back({kind, std::move(detail), t}); }

  ValidationReport finish() {
    std::stable_sort(report_.violations.begin(), report_.violations.end(),
                     [](const Violation& a, const Violation& b) { return a.time < b.time; });
    report_.ok = report_.violations.empty();
    return std::move(report_);
  }

  void check_agent(int a) {
    const AgentPath& path = s_.paths[a];
    const MotionGraph& g = p_.graph();
    if (path.positions.empty()) {
      add(ViolationKind::Discontinuity, 0, agent_name(a) + " has an empty path");
      return;
    }
    if (path.positions[0] != p_.agents[a].start)
      add(ViolationKind::Discontinuity, 0, agent_name(a) + " does not begin at its start vertex");
    for (size_t t = 0; t < path.positions.size(); ++t) {
      VertexId v = path.positions[t];
      if (v < 0 || v >= g.size()) {
        add(ViolationKind::Discontinuity, static_cast<Time>(t), agent_name(a) + " at an invalid vertex");
        return;
      }
      if (t > 0 && v != path.positions[t - 1] && !g.adjacent(path.positions[t - 1], v))
        add(ViolationKind::Discontinuity, static_cast<Time>(t - 1), agent_name(a) + " jumps between non-adjacent cells");
    }
    if (path.positions.back() != p_.agents[a].park)
      add(ViolationKind::Parking, path.arrival(), agent_name(a) + " does not end at its parking vertex");

    const auto& allot = p_.allotments[a];
    if (path.events.size() != allot.size()) {
      add(ViolationKind::Interval, 0, agent_name(a) + " has " + std::to_string(path.events.size()) +
                                          " task events for " + std::to_string(allot.size()) + " allotted tasks");
      return;
    }
    events_ok_[a] = true;
    Time previous = 0;
    for (size_t k = 0; k < allot.size(); ++k) {
      const Task& task = p_.tasks[allot[k]];
      TaskEvent ev = path.events[k];
      std::string who = agent_name(a) + " " + task_name(allot[k]);
      if (ev.pickup < previous || ev.delivery < ev.pickup || ev.delivery > path.arrival()) {
        add(ViolationKind::Interval, ev.pickup, who + " events out of order or after arrival");
        events_ok_[a] = false;
        continue;
      }
      if (path.at(ev.pickup) != task.pickup)
        add(ViolationKind::Interval, ev.pickup, who + " pickup away from the pickup vertex");
      if (path.at(ev.delivery) != task.delivery)
        add(ViolationKind::Interval, ev.delivery, who + " delivery away from the delivery vertex");
      previous = ev.delivery;
    }
  }

  std::optional<TaskEvent> event(int agent, int task) const {
    if (!events_ok_[agent]) return std::nullopt;
    int k = p_.allotment_index(agent, task);
    return s_.paths[agent].events[k];
  }

  void check_coalitions() {
    for (int t = 0; t < p_.task_count(); ++t) {
      const auto& co = p_.tasks[t].coalition;
      if (co.size() < 2) continue;
      auto lead = event(co[0], t);
      if (!lead) continue;
      bool synced = true;
      for (size_t i = 1; i < co.size(); ++i) {
        auto ev = event(co[i], t);
        if (ev && *ev != *lead) {
          add(ViolationKind::CoalitionDesync, std::min(ev->pickup, lead->pickup),
              task_name(t) + " members disagree on pickup/delivery times");
          synced = false;
        }
      }
      if (!synced) continue;
      for (Time time = lead->pickup; time <= lead->delivery; ++time) {
        VertexId v = s_.paths[co[0]].at(time);
        bool apart = std::any_of(co.begin() + 1, co.end(), [&](int m) { return s_.paths[m].at(time) != v; });
        if (apart) {
          add(ViolationKind::CoalitionDesync, time, task_name(t) + " members apart while carrying");
          break;
        }
      }
    }
  }

  void check_precedence() {
    for (auto [before, after] : p_.edges) {
      Time done = -1, begun = kInfinity;
      for (int m : p_.tasks[before].coalition)
        if (auto ev = event(m, before)) done = std::max(done, ev->delivery);
      for (int m : p_.tasks[after].coalition)
        if (auto ev = event(m, after)) begun = std::min(begun, ev->pickup);
      if (done >= 0 && begun < kInfinity && done > begun)
        add(ViolationKind::Precedence, begun,
            task_name(after) + " picked up before " + task_name(before) + " was delivered");
    }
  }

  bool same_task(int a, int b, Time t) const {
    if (!events_ok_[a] || !events_ok_[b]) return false;
    return executing_same_task(p_, s_.paths[a], s_.paths[b], t);
  }

  void check_collisions() {
    const int n = p_.agent_count();
    Time horizon = 0;
    for (const auto& path : s_.paths) horizon = std::max(horizon, path.arrival());
    ++horizon;  // everyone is parked from here on
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const AgentPath& pa = s_.paths[a];
        const AgentPath& pb = s_.paths[b];
        if (pa.positions.empty() || pb.positions.empty()) continue;
        for (Time t = 0; t <= horizon; ++t) {
          if (is_vertex_collision(pa.at(t), pb.at(t), same_task(a, b, t))) {
            add(ViolationKind::VertexCollision, t, agent_name(a) + " and " + agent_name(b) + " share a vertex");
            break;
          }
          if (t == horizon) break;
          Move ma{pa.at(t), pa.at(t + 1)}, mb{pb.at(t), pb.at(t + 1)};
          if (is_edge_collision(ma, mb, same_task(a, b, t) && same_task(a, b, t + 1))) {
            add(ViolationKind::EdgeCollision, t, agent_name(a) + " and " + agent_name(b) + " swap cells");
            break;
          }
        }
      }
  }

  const Problem& p_;
  const Solution& s_;
  std::vector<bool> events_ok_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate_solution(const Problem& problem, const Solution& solution) {
  return Validator(problem, solution).run();
}

namespace {

// Joint state: vertex and progress (waypoints reached: 2k = heading to the
// k-th pickup, 2k+1 = carrying the k-th task) per agent.
struct JointState {
  std::vector<VertexId> at;
  std::vector<int> progress;
};

class Oracle {
 public:
  Oracle(const Problem& problem, uint64_t budget, bool want_solution)
      : p_(problem), g_(problem.graph()), budget_(budget), want_solution_(want_solution) {
    n_ = p_.agent_count();
    // Mixed-radix encoding must fit in 64 bits.
    long double capacity = 1;
    for (int a = 0; a < n_; ++a) {
      capacity *= static_cast<long double>(g_.size());
      capacity *= static_cast<long double>(2 * p_.allotments[a].size() + 1);
    }
    encodable_ = capacity < 1.8e19L;
  }

  OracleResult run() {
    OracleResult result;
    if (!encodable_) return result;
    for (int a = 0; a < n_; ++a)
      for (int t : p_.allotments[a])
        for (int m : p_.tasks[t].coalition)
          if (p_.allotment_index(m, t) < 0) {
            result.status = OracleStatus::Infeasible;
            return result;
          }

    JointState init{{}, std::vector<int>(n_, 0)};
    for (int a = 0; a < n_; ++a) init.at.push_back(p_.agents[a].start);
    std::vector<JointState> frontier;
    for (JointState& s : closure(init)) {
      if (!collision_free(init, s, /*initial=*/true)) continue;
      if (visit(s, kNoParent)) frontier.push_back(std::move(s));
    }

    Time t = 0;
    while (!frontier.empty()) {
      for (const JointState& s : frontier)
        if (is_goal(s)) {
          result.status = OracleStatus::Solved;
          result.makespan = t;
          result.expanded = expanded_;
          if (want_solution_) result.solution = reconstruct(s, t);
          return result;
        }
      std::vector<JointState> next;
      for (const JointState& s : frontier) {
        if (++expanded_ > budget_) {
          result.expanded = expanded_;
          return result;
        }
        uint64_t from = encode(s);
        JointState moved = s;
        enumerate_moves(s, moved, 0, [&](const JointState& m) {
          for (JointState& c : closure(m)) {
            if (!collision_free(s, c, false)) continue;
            if (visit(c, from)) next.push_back(std::move(c));
          }
        });
      }
      frontier = std::move(next);
      ++t;
    }
    result.status = OracleStatus::Infeasible;
    result.expanded = expanded_;
    return result;
  }

 private:
  static constexpr uint64_t kNoParent = ~uint64_t{0};

  uint64_t encode(const JointState& s) const {
    uint64_t key = 0;
    for (int a = 0; a < n_; ++a) {
      key = key * static_cast<uint64_t>(g_.size()) + static_cast<uint64_t>(s.at[a]);
      key = key * (2 * p_.allotments[a].size() + 1) + static_cast<uint64_t>(s.progress[a]);
    }
    return key;
  }

  JointState decode(uint64_t key) const {
    JointState s{std::vector<VertexId>(n_), std::vector<int>(n_)};
    for (int a = n_ - 1; a >= 0; --a) {
      uint64_t radix = 2 * p_.allotments[a].size() + 1;
      s.progress[a] = static_cast<int>(key % radix);
      key /= radix;
      s.at[a] = static_cast<VertexId>(key % static_cast<uint64_t>(g_.size()));
      key /= static_cast<uint64_t>(g_.size());
    }
    return s;
  }

  bool visit(const JointState& s, uint64_t parent) {
    uint64_t key = encode(s);
    if (want_solution_) return parents_.emplace(key, parent).second;
    return seen_.insert(key).second;
  }

  bool is_goal(const JointState& s) const {
    for (int a = 0; a < n_; ++a)
      if (s.at[a] != p_.agents[a].park || s.progress[a] != 2 * static_cast<int>(p_.allotments[a].size()))
        return false;
    return true;
  }

  // Task the agent is carrying, -1 if none.
  int carrying(const JointState& s, int a) const {
    return s.progress[a] % 2 == 1 ? p_.allotments[a][s.progress[a] / 2] : -1;
  }

  bool delivered(const JointState& s, int task) const {
    for (int m : p_.tasks[task].coalition)
      if (s.progress[m] <= 2 * p_.allotment_index(m, task) + 1) return false;
    return true;
  }

  // Coalition members carrying a task copy the move of the lowest-index member.
  template <typename Emit>
  void enumerate_moves(const JointState& s, JointState& moved, int a, Emit&& emit) const {
    if (a == n_) {
      emit(moved);
      return;
    }
    int task = carrying(s, a);
    if (task >= 0 && p_.tasks[task].coalition.front() != a) {
      moved.at[a] = moved.at[p_.tasks[task].coalition.front()];
      enumerate_moves(s, moved, a + 1, emit);
      return;
    }
    moved.at[a] = s.at[a];
    enumerate_moves(s, moved, a + 1, emit);
    for (VertexId n : g_.neighbors(s.at[a])) {
      moved.at[a] = n;
      enumerate_moves(s, moved, a + 1, emit);
    }
  }

  // Every state reachable by firing any sequence of enabled task events at
  // the current timestep (including firing none).
  std::vector<JointState> closure(const JointState& start) const {
    std::vector<JointState> out{start};
    std::unordered_set<uint64_t> seen{encode(start)};
    for (size_t i = 0; i < out.size(); ++i) {
      for (int task = 0; task < p_.task_count(); ++task) {
        JointState s = out[i];
        if (!fire(s, task)) continue;
        if (seen.insert(encode(s)).second) out.push_back(std::move(s));
      }
    }
    return out;
  }

  bool fire(JointState& s, int task) const {
    const Task& tk = p_.tasks[task];
    bool pickup = true, deliver = true;
    for (int m : tk.coalition) {
      int k = p_.allotment_index(m, task);
      pickup = pickup && s.progress[m] == 2 * k && s.at[m] == tk.pickup;
      deliver = deliver && s.progress[m] == 2 * k + 1 && s.at[m] == tk.delivery;
    }
    if (pickup)
      for (auto [before, after] : p_.edges)
        if (after == task && !delivered(s, before)) pickup = false;
    if (!pickup && !deliver) return false;
    for (int m : tk.coalition) ++s.progress[m];
    return true;
  }

  // Agents a and b share a task whose [pickup, delivery] contains the new
  // timestep, given progress before and after it.
  bool exempt(const JointState& before, const JointState& after, int a, int b, bool initial) const {
    const auto& allot = p_.allotments[a];
    for (size_t i = 0; i < allot.size(); ++i) {
      int k = p_.allotment_index(b, allot[i]);
      if (k < 0) continue;
      int slot = 2 * static_cast<int>(i) + 1;
      bool picked = after.progress[a] >= slot;
      bool not_yet_delivered = initial || before.progress[a] <= slot;
      if (picked && not_yet_delivered) return true;
    }
    return false;
  }

  bool collision_free(const JointState& before, const JointState& after, bool initial) const {
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) {
        if (after.at[a] == after.at[b] && !exempt(before, after, a, b, initial)) return false;
        if (!initial && after.at[a] != before.at[a] && after.at[a] == before.at[b] && after.at[b] == before.at[a])
          return false;
      }
    return true;
  }

  Solution reconstruct(const JointState& goal, Time makespan) const {
    std::vector<JointState> chain;
    for (uint64_t key = encode(goal); key != kNoParent; key = parents_.at(key)) chain.push_back(decode(key));
    std::reverse(chain.begin(), chain.end());
    Solution sol;
    sol.paths.resize(n_);
    for (int a = 0; a < n_; ++a) {
      AgentPath& path = sol.paths[a];
      path.agent = a;
      path.events.resize(p_.allotments[a].size());
      int progress = 0;
      for (Time t = 0; t <= makespan; ++t) {
        path.positions.push_back(chain[t].at[a]);
        for (; progress < chain[t].progress[a]; ++progress) {
          if (progress % 2 == 0) path.events[progress / 2].pickup = t;
          else path.events[progress / 2].delivery = t;
        }
      }
      // Trim the trailing rest at the parking vertex.
      while (path.positions.size() > 1 && path.positions.back() == path.positions[path.positions.size() - 2]) {
        Time last = static_cast<Time>(path.positions.size()) - 1;
        bool event_at_last = std::any_of(path.events.begin(), path.events.end(),
                                         [&](const TaskEvent& e) { return e.delivery >= last || e.pickup >= last; });
        if (event_at_last) break;
        path.positions.pop_back();
      }
    }
    return sol;
  }

  const Problem& p_;
  const MotionGraph& g_;
  uint64_t budget_;
  bool want_solution_;
  int n_ = 0;
  bool encodable_ = true;
  uint64_t expanded_ = 0;
  std::unordered_set<uint64_t> seen_;
  std::unordered_map<uint64_t, uint64_t> parents_;
};

}  // namespace

OracleResult oracle_makespan(const Problem& problem, uint64_t budget, bool want_solution) {
  return Oracle(problem, budget, want_solution).run();
}

}  // namespace pcmapf
