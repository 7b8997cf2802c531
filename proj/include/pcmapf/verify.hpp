#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcmapf/plan.hpp"

namespace pcmapf {

enum class ViolationKind {
  VertexCollision,
  EdgeCollision,
  Precedence,
  CoalitionDesync,
  Interval,  // event time or place inconsistent with the path or the allotment order
  Parking,
  Discontinuity,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string detail;
  Time time = 0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;

  bool has(ViolationKind kind) const;
  std::string summary() const;
};

// Checks a joint plan against the problem using only the grid predicates and
// the problem description.
ValidationReport validate_solution(const Problem& problem, const Solution& solution);

enum class OracleStatus { Solved, Infeasible, BudgetExceeded };

struct OracleResult {
  OracleStatus status = OracleStatus::BudgetExceeded;
  Time makespan = 0;
  uint64_t expanded = 0;
  std::optional<Solution> solution;  // filled when requested
};

inline constexpr uint64_t kDefaultOracleBudget = 10'000'000;

// Breadth-first search over joint states (every agent's vertex and task
// progress). Exact but exponential; meant for tiny instances only.
OracleResult oracle_makespan(const Problem& problem, uint64_t budget = kDefaultOracleBudget,
                             bool want_solution = false);

}  // namespace pcmapf
