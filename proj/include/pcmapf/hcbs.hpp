#pragma once

#include <vector>

#include "pcmapf/plan.hpp"
#include "pcmapf/taskgraph.hpp"

namespace pcmapf {

// Critical-path slack of every task-graph node and of every agent's final
// drive to its parking vertex, measured against the collision-free makespan.
struct SlackTable {
  std::vector<Time> node;
  std::vector<Time> park;  // per agent
  Time makespan = 0;       // collision-free makespan
  std::vector<Time> latest_start;  // per node
};

SlackTable compute_slack(const Problem& problem, const TaskGraph& graph, const IntervalTable& intervals);

struct HcbsOptions {
  double timeout_seconds = 300.0;
  uint64_t max_ct_nodes = 0;  // 0: unlimited
};

// Hierarchical baseline: CBS over task segments, segments scheduled in
// topological order by ascending slack and planned one at a time by A*.
SolveResult solve_hcbs(const Problem& problem, const HcbsOptions& options = {});

}  // namespace pcmapf
