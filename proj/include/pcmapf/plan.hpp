#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcmapf/problem.hpp"

namespace pcmapf {

struct TaskEvent {
  Time pickup = 0;
  Time delivery = 0;
  bool operator==(const TaskEvent&) const = default;
};

// Vertex per timestep from t = 0 up to the final arrival at the parking
// vertex; the agent stays there afterwards. `events[i]` belongs to the i-th
// task of the agent's allotment.
struct AgentPath {
  int agent = -1;
  std::vector<VertexId> positions;
  std::vector<TaskEvent> events;

  Time arrival() const { return static_cast<Time>(positions.size()) - 1; }
  VertexId at(Time t) const {
    if (positions.empty()) return kNoVertex;
    return t < static_cast<Time>(positions.size()) ? positions[t] : positions.back();
  }
  bool operator==(const AgentPath&) const = default;
};

// True when both agents carry out the same task at timestep t, i.e. they share
// a task whose [pickup, delivery] window contains t. Only such agents may share
// a vertex.
bool executing_same_task(const Problem& problem, const AgentPath& a, const AgentPath& b, Time t);

// Task executed by `path` at t, -1 if none.
int active_task(const Problem& problem, const AgentPath& path, Time t);

struct SolveStats {
  uint64_t ct_nodes = 0;
  uint64_t ll_expansions = 0;
  int64_t runtime_ms = 0;
};

struct Solution {
  std::vector<AgentPath> paths;  // indexed by agent
  Time makespan() const;
  bool operator==(const Solution&) const = default;
};

enum class SolveStatus { Solved, Timeout, Exhausted, Infeasible };

const char* to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::Exhausted;
  std::optional<Solution> solution;
  SolveStats stats;
  std::string algorithm;
};

// Solution file:
//   makespan <m>
//   path <agent-id> (r,c)@0 (r,c)@1 ...
//   event <task-id> pickup <t> deliver <t>
//   ct_nodes <n> / ll_expansions <n> / runtime_ms <n> / algorithm <name>
// Task events are written once per task (taken from its first coalition
// member); when read back every coalition member receives them.
std::string format_solution(const Problem& problem, const Solution& solution,
                            const SolveStats* stats = nullptr, std::string_view algorithm = {});
Solution parse_solution(const Problem& problem, std::string_view text);

}  // namespace pcmapf
