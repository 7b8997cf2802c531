#pragma once

#include <array>
#include <chrono>
#include <optional>
#include <span>
#include <vector>

#include "pcmapf/lowlevel.hpp"
#include "pcmapf/plan.hpp"
#include "pcmapf/taskgraph.hpp"

namespace pcmapf {

struct CtNode {
  ConstraintSet constraints;
  IntervalTable intervals;
  std::vector<AgentPath> paths;  // indexed by agent
  Time cost = 0;                 // makespan of `paths`
  int conflicts = 0;             // collision count, secondary ordering key
  uint64_t id = 0;               // creation order
};

// Where to cut an interval when a precedence conflict is resolved.
enum class SplitRule {
  MaxPredecessorEnd,  // latest observed predecessor end time
  MinPlusOne,         // one past the node's observed start
};

struct PrecedenceConflict {
  enum class Kind {
    StartViolation,  // some predecessor ends after the node starts
    EndMismatch,     // coalition members deliver at different timesteps
  };
  Kind kind = Kind::StartViolation;
  int node = -1;  // task-graph node
  Time observed = 0;  // observed start (StartViolation) or earliest delivery (EndMismatch)
  std::vector<Time> violating_times;  // predecessor ends > observed, or the members' deliveries
};

// Observed start/end of a task-graph node in a joint plan. GO ends at the
// agent's pickup; CARRY spans first member pickup to last member delivery.
Time observed_start(const Problem& problem, const TaskGraph& graph, std::span<const AgentPath> paths, int node);
Time observed_end(const Problem& problem, const TaskGraph& graph, std::span<const AgentPath> paths, int node);

// First node in topological order whose observed times contradict the graph.
std::optional<PrecedenceConflict> detect_precedence_conflict(const Problem& problem, const TaskGraph& graph,
                                                             std::span<const AgentPath> paths);

struct IntervalSplit {
  int node = -1;
  bool start_side = true;  // which endpoint interval of `node` is split
  std::array<Interval, 2> children;
};

// Splits [min, max] into [min, s-1] and [s, max] with s clamped to max.
std::array<Interval, 2> split_interval(Interval old, Time split_time);

IntervalSplit resolve_precedence_conflict(const IntervalTable& intervals, const PrecedenceConflict& conflict,
                                          SplitRule rule = SplitRule::MaxPredecessorEnd);

struct DesyncConflict {
  int task = -1;
  int first = -1, second = -1;  // agents
  VertexId first_at = kNoVertex, second_at = kNoVertex;
  Time time = 0;
};

// Coalition members whose pickups and deliveries agree but whose positions
// differ at some timestep strictly inside the carry.
std::optional<DesyncConflict> detect_desync_conflict(const Problem& problem, std::span<const AgentPath> paths);

struct CollisionConflict {
  int first = -1, second = -1;  // agents, first < second
  bool edge = false;
  VertexId v = kNoVertex;  // vertex, or the first agent's move v -> u over t -> t+1
  VertexId u = kNoVertex;
  Time time = 0;
};

std::optional<CollisionConflict> detect_collision_conflict(const Problem& problem, std::span<const AgentPath> paths);
int count_collisions(const Problem& problem, std::span<const AgentPath> paths);

// Constraint sets of the two children (first agent banned, second agent banned).
std::array<ConstraintSet, 2> resolve_collision_conflict(const ConstraintSet& parent, const CollisionConflict& c);

// Agents by estimate descending, ties by index ascending.
std::vector<int> replan_priority(std::span<const int> agents, std::span<const Time> estimates);

// Completion estimate ignoring other agents: last carry's earliest end plus
// the drive to the parking vertex.
Time collision_free_estimate(const Problem& problem, const TaskGraph& graph, const IntervalTable& intervals,
                             int agent);

struct PcCbsOptions {
  double timeout_seconds = 300.0;
  SplitRule split_rule = SplitRule::MaxPredecessorEnd;
  uint64_t max_ct_nodes = 0;  // 0: unlimited
};

SolveResult solve_pccbs(const Problem& problem, const PcCbsOptions& options = {});

}  // namespace pcmapf
