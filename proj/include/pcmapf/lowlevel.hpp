#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pcmapf/plan.hpp"
#include "pcmapf/taskgraph.hpp"

namespace pcmapf {

struct VertexConstraint {
  int owner = -1;
  VertexId vertex = kNoVertex;
  Time time = 0;
  bool operator==(const VertexConstraint&) const = default;
};

// Forbids traversing from -> to during the step time -> time + 1.
struct EdgeConstraint {
  int owner = -1;
  VertexId from = kNoVertex;
  VertexId to = kNoVertex;
  Time time = 0;
  bool operator==(const EdgeConstraint&) const = default;
};

// Collision constraints of one conflict-tree node. `owner` names whoever the
// constraint binds: an agent for PC-CBS, a task segment for H-CBS.
class ConstraintSet {
 public:
  void add_vertex(int owner, VertexId v, Time t) { vertex_.push_back({owner, v, t}); }
  void add_edge(int owner, VertexId from, VertexId to, Time t) { edge_.push_back({owner, from, to, t}); }

  std::span<const VertexConstraint> vertex_constraints() const { return vertex_; }
  std::span<const EdgeConstraint> edge_constraints() const { return edge_; }
  size_t size() const { return vertex_.size() + edge_.size(); }

  bool forbids_vertex(int owner, VertexId v, Time t) const;
  bool forbids_edge(int owner, VertexId from, VertexId to, Time t) const;

 private:
  std::vector<VertexConstraint> vertex_;
  std::vector<EdgeConstraint> edge_;
};

// C1 delay cost, C2 precedence conflicts, C3 collision conflicts,
// C4 move actions + cost-to-go, C5 cost-to-go, C6 f-value. Lexicographic.
struct HeuristicTuple {
  int c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0, c6 = 0;
  auto operator<=>(const HeuristicTuple&) const = default;
};

// One task event the agent must trigger, in order: pickup or delivery at
// `vertex` at a timestep inside `window`.
struct Waypoint {
  VertexId vertex = kNoVertex;
  Interval window;
  int task = -1;
  bool pickup = true;
};

// Other agents' current paths, indexed for the C2/C3 counters.
class ConflictAvoidanceTable {
 public:
  ConflictAvoidanceTable() = default;
  ConflictAvoidanceTable(const Problem& problem, std::span<const AgentPath> paths, int self);

  int vertex_conflicts(VertexId v, Time t, int own_task) const;
  int edge_conflicts(VertexId from, VertexId to, Time t) const;
  // Visits of other agents to `v` strictly after t (the agent rests there).
  int conflicts_after(VertexId v, Time t) const;
  int pickup_conflicts(int task, Time t) const;
  int delivery_conflicts(int task, Time t) const;
  int carry_desync(int task, VertexId v, Time t) const;
  bool empty() const { return paths_.empty(); }

 private:
  VertexId position(int idx, Time t) const;

  const Problem* problem_ = nullptr;
  int self_ = -1;
  std::vector<const AgentPath*> paths_;
  std::vector<int> slot_of_agent_;
  std::unordered_map<uint64_t, std::vector<int>> occupancy_;  // (v,t) -> path slots, t <= arrival
  std::vector<std::vector<int>> parked_at_;                    // v -> slots resting at v
  std::vector<std::vector<Time>> visits_;                      // v -> timesteps some other agent is at v
};

enum class HeuristicMode {
  Cascade,  // full (C1..C6) tuple
  FValue,   // C6 only
};

inline constexpr Time kNoHold = -1;

struct LowLevelRequest {
  int agent = -1;           // agent the path belongs to
  int constraint_owner = -1;
  VertexId start = kNoVertex;
  Time start_time = 0;
  std::vector<Waypoint> waypoints;
  VertexId goal = kNoVertex;
  Time goal_not_before = 0;
  // The goal vertex must stay free of the owner's vertex constraints from the
  // arrival up to this time. kInfinity: the agent rests there for good;
  // kNoHold: nothing is required after the arrival.
  Time hold_until = kInfinity;
  Time max_time = kInfinity;  // no state beyond this timestep
  Time makespan_bound = 0;
  HeuristicMode mode = HeuristicMode::Cascade;
  // Search gives up (returns nullopt) once this passes; callers check the
  // clock themselves to tell a timeout from infeasibility.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct LowLevelResult {
  std::vector<VertexId> positions;  // positions[i] is the vertex at start_time + i
  std::vector<Time> event_times;    // one per waypoint
  HeuristicTuple goal_tuple;
  uint64_t expansions = 0;
};

// Sum of shortest-path distances from `position` through the remaining
// waypoints (index `reached` onwards) to the goal.
Time cost_to_go(VertexId position, int reached, std::span<const Waypoint> waypoints, VertexId goal,
                const DistanceTable& dist);

// Tuple of a path prefix that starts at request.start_time; `event_times`
// holds the times of the waypoints reached so far.
HeuristicTuple heuristic_tuple(const LowLevelRequest& request, const ConflictAvoidanceTable& others,
                               const DistanceTable& dist, std::span<const VertexId> prefix,
                               std::span<const Time> event_times);

// Multi-waypoint space-time A* ordered by the cascaded tuple. nullopt when no
// path satisfies the constraints and waypoint windows within max_time.
std::optional<LowLevelResult> plan_path(const LowLevelRequest& request, const ConstraintSet& constraints,
                                        const ConflictAvoidanceTable& others, const Problem& problem,
                                        uint64_t* expansions = nullptr);

// Waypoints of an agent's allotment with windows taken from the interval
// table (pickup: GO end ∩ CARRY start, delivery: CARRY end ∩ next GO start).
std::vector<Waypoint> agent_waypoints(const Problem& problem, const TaskGraph& graph,
                                      const IntervalTable& intervals, int agent);

// PC-CBS single-agent planner: whole itinerary from t = 0 to the parking
// vertex. nullopt when infeasible under the node's constraints/intervals.
std::optional<AgentPath> plan_agent_path(const Problem& problem, const TaskGraph& graph,
                                         const IntervalTable& intervals, const ConstraintSet& constraints,
                                         std::span<const AgentPath> other_plans, int agent,
                                         Time makespan_bound, uint64_t* expansions = nullptr,
                                         std::optional<std::chrono::steady_clock::time_point> deadline = {});

}  // namespace pcmapf
