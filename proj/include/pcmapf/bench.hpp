#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcmapf/plan.hpp"

namespace pcmapf {

enum class GeneratorMode {
  Assembly,  // random explicit edges between tasks
  Cmapd,     // no explicit edges; precedence only through shared agents
};

std::optional<GeneratorMode> parse_generator_mode(std::string_view name);

struct GeneratorConfig {
  std::shared_ptr<const Environment> env;
  GeneratorMode mode = GeneratorMode::Assembly;
  int agent_count = 2;
  int mean_tasks = 2;  // per agent
  int coalition_degree = 1;
  double explicit_edge_probability = 0.3;
  uint64_t seed = 0;
  int max_tasks_per_agent = 0;  // 0: no cap
};

// Random starts and task endpoints, greedy earliest-start assignment and
// parking vertices. A pure function of the config. Throws InvalidProblem when
// the map is too small or the result fails the feasibility screen.
Problem generate_instance(const GeneratorConfig& config);

// Static screen: consistent references, acyclic task graph, every endpoint
// reachable from where the agent comes from.
void screen_instance(const Problem& problem);

struct MetricsReport {
  int instances = 0;
  int jointly_solved = 0;
  double solved_pc = 0;    // fraction
  double solved_h = 0;     // fraction
  double pct_subopt = 0;   // percent of jointly solved where H-CBS is worse
  double avg_regret = 0;   // mean (H-CBS - PC-CBS) makespan over jointly solved
};

// Makespans per instance; nullopt = not solved.
MetricsReport compute_metrics(std::span<const std::optional<Time>> pc, std::span<const std::optional<Time>> h);

struct NamedInstance {
  std::string name;
  Problem problem;
};

// Reads map.map and every *.problem file (sorted by name) from a directory
// written by the generator.
std::vector<NamedInstance> load_instance_dir(const std::string& dir);

struct RunRecord {
  std::string instance;
  std::string algorithm;
  SolveStatus status = SolveStatus::Exhausted;
  Time makespan = -1;
  int64_t runtime_ms = 0;
  uint64_t ct_nodes = 0;
  uint64_t ll_expansions = 0;
  bool valid = false;  // validator-clean (solved runs only)
  std::string solution_text;  // formatted solution without timing, solved runs only
};

struct BenchmarkResult {
  std::vector<RunRecord> rows;  // instance-major, algorithm order as requested
  MetricsReport metrics;
};

class ValidatorGateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs each algorithm ("pc-cbs", "h-cbs") on each instance with `workers`
// threads. Every solved run is validated; a failure throws ValidatorGateError.
BenchmarkResult run_benchmark(std::span<const NamedInstance> instances, std::span<const std::string> algorithms,
                              double timeout_seconds, int workers = 0);

// Conflict-tree nodes allowed per run before it counts as a timeout. An H-CBS
// node costs about 2 KB, so this keeps one run under roughly 4 GB.
inline constexpr uint64_t kNodeCap = 2'000'000;

SolveResult solve_with(const Problem& problem, std::string_view algorithm, double timeout_seconds,
                       uint64_t max_ct_nodes = kNodeCap);

std::string format_csv(std::span<const RunRecord> rows);

}  // namespace pcmapf
