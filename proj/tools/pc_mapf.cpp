// pc-mapf command line front end. Talks to the solver only through the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "pcmapf/pcmapf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnsolved = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitValidation = 3;

struct MapDeleter {
  void operator()(pcmapf_map* m) const { pcmapf_map_free(m); }
};
struct ProblemDeleter {
  void operator()(pcmapf_problem* p) const { pcmapf_problem_free(p); }
};
struct SolutionDeleter {
  void operator()(pcmapf_solution* s) const { pcmapf_solution_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { pcmapf_string_free(s); }
};
using MapPtr = std::unique_ptr<pcmapf_map, MapDeleter>;
using ProblemPtr = std::unique_ptr<pcmapf_problem, ProblemDeleter>;
using SolutionPtr = std::unique_ptr<pcmapf_solution, SolutionDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int exit_code(pcmapf_status status) {
  switch (status) {
    case PCMAPF_OK: return kExitOk;
    case PCMAPF_UNSOLVED: return kExitUnsolved;
    case PCMAPF_VALIDATION_FAILED: return kExitValidation;
    case PCMAPF_INVALID_INPUT:
    case PCMAPF_INTERNAL_ERROR: break;
  }
  return kExitInvalid;
}

int report(pcmapf_status status, const std::string& context) {
  std::cerr << "pc-mapf: " << context << ": " << pcmapf_last_error() << "\n";
  return exit_code(status);
}

bool load(const std::string& map_path, const std::string& problem_path, MapPtr& map, ProblemPtr& problem, int& code) {
  pcmapf_map* m = nullptr;
  if (pcmapf_status s = pcmapf_map_load(map_path.c_str(), &m); s != PCMAPF_OK) {
    code = report(s, map_path);
    return false;
  }
  map.reset(m);
  pcmapf_problem* p = nullptr;
  if (pcmapf_status s = pcmapf_problem_load(map.get(), problem_path.c_str(), &p); s != PCMAPF_OK) {
    code = report(s, problem_path);
    return false;
  }
  problem.reset(p);
  return true;
}

struct SolveArgs {
  std::string map, problem, algorithm = "pc-cbs", out;
  double timeout = 300;
};

int run_solve(const SolveArgs& a) {
  MapPtr map;
  ProblemPtr problem;
  int code = 0;
  if (!load(a.map, a.problem, map, problem, code)) return code;
  pcmapf_solution* raw = nullptr;
  pcmapf_status s = pcmapf_solve(problem.get(), a.algorithm.c_str(), a.timeout, &raw);
  if (s != PCMAPF_OK) return report(s, "solve");
  SolutionPtr solution(raw);
  char* violations = nullptr;
  pcmapf_status v = pcmapf_validate(problem.get(), solution.get(), &violations);
  StringPtr listing(violations);
  if (v != PCMAPF_OK) {
    std::cerr << "pc-mapf: solver output rejected by the validator\n" << (listing ? listing.get() : "");
    return exit_code(v);
  }
  StringPtr text(pcmapf_solution_format(solution.get(), 1));
  if (a.out.empty() || a.out == "-") {
    std::cout << text.get();
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) {
      std::cerr << "pc-mapf: cannot write " << a.out << "\n";
      return kExitInvalid;
    }
    f << text.get();
  }
  std::cerr << "makespan " << pcmapf_solution_makespan(solution.get()) << "\n";
  return kExitOk;
}

struct GenerateArgs {
  std::string map, mode = "assembly", out_dir;
  int agents = 2, mean_tasks = 2, degree = 1, count = 1, max_tasks = 0;
  double edge_probability = 0.3;
  uint64_t seed = 0;
};

int run_generate(const GenerateArgs& a) {
  pcmapf_map* m = nullptr;
  if (pcmapf_status s = pcmapf_map_load(a.map.c_str(), &m); s != PCMAPF_OK) return report(s, a.map);
  MapPtr map(m);
  pcmapf_generator_config cfg;
  pcmapf_generator_defaults(&cfg);
  cfg.mode = a.mode.c_str();
  cfg.agents = a.agents;
  cfg.mean_tasks = a.mean_tasks;
  cfg.coalition_degree = a.degree;
  cfg.edge_probability = a.edge_probability;
  cfg.seed = a.seed;
  cfg.max_tasks_per_agent = a.max_tasks;
  if (pcmapf_status s = pcmapf_generate_dir(map.get(), &cfg, a.count, a.out_dir.c_str()); s != PCMAPF_OK)
    return report(s, "generate");
  return kExitOk;
}

struct BenchArgs {
  std::string instances, algorithms = "pc-cbs,h-cbs", csv;
  double timeout = 300;
  int workers = 0;
};

int run_bench(const BenchArgs& a) {
  pcmapf_metrics m{};
  pcmapf_status s = pcmapf_bench(a.instances.c_str(), a.algorithms.c_str(), a.timeout, a.workers,
                                 a.csv.empty() ? nullptr : a.csv.c_str(), &m);
  if (s != PCMAPF_OK) return report(s, "bench");
  std::printf("instances %d\njointly_solved %d\nsolved_pc %.4f\nsolved_h %.4f\npct_subopt %.2f\navg_regret %.4f\n",
              m.instances, m.jointly_solved, m.solved_pc, m.solved_h, m.pct_subopt, m.avg_regret);
  return kExitOk;
}

struct VerifyArgs {
  std::string map, problem, solution;
};

int run_verify(const VerifyArgs& a) {
  MapPtr map;
  ProblemPtr problem;
  int code = 0;
  if (!load(a.map, a.problem, map, problem, code)) return code;
  pcmapf_solution* raw = nullptr;
  if (pcmapf_status s = pcmapf_solution_load(problem.get(), a.solution.c_str(), &raw); s != PCMAPF_OK)
    return report(s, a.solution);
  SolutionPtr solution(raw);
  char* violations = nullptr;
  pcmapf_status s = pcmapf_validate(problem.get(), solution.get(), &violations);
  StringPtr listing(violations);
  if (s == PCMAPF_OK) {
    std::cout << "valid, makespan " << pcmapf_solution_makespan(solution.get()) << "\n";
    return kExitOk;
  }
  std::cout << (listing ? listing.get() : "");
  return exit_code(s);
}

struct OracleArgs {
  std::string map, problem;
  uint64_t budget = 10'000'000;
};

int run_oracle(const OracleArgs& a) {
  MapPtr map;
  ProblemPtr problem;
  int code = 0;
  if (!load(a.map, a.problem, map, problem, code)) return code;
  int makespan = 0;
  if (pcmapf_status s = pcmapf_oracle(problem.get(), a.budget, &makespan); s != PCMAPF_OK)
    return report(s, "oracle");
  std::cout << "makespan " << makespan << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Makespan-optimal multi-agent pickup and delivery with precedence constraints"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Plan paths for one problem");
  s->add_option("--map", solve.map, "Map file")->required();
  s->add_option("--problem", solve.problem, "Problem file")->required();
  s->add_option("--algorithm", solve.algorithm, "pc-cbs or h-cbs")->check(CLI::IsMember({"pc-cbs", "h-cbs"}));
  s->add_option("--timeout-seconds", solve.timeout, "Wall-clock limit")->check(CLI::PositiveNumber);
  s->add_option("--out", solve.out, "Solution file (stdout when omitted)");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write random problem instances");
  g->add_option("--map", gen.map, "Map file")->required();
  g->add_option("--mode", gen.mode, "assembly or cmapd")->check(CLI::IsMember({"assembly", "cmapd"}));
  g->add_option("--agents", gen.agents)->check(CLI::PositiveNumber);
  g->add_option("--mean-tasks", gen.mean_tasks)->check(CLI::PositiveNumber);
  g->add_option("--coalition-degree", gen.degree)->check(CLI::PositiveNumber);
  g->add_option("--edge-probability", gen.edge_probability)->check(CLI::Range(0.0, 1.0));
  g->add_option("--max-tasks-per-agent", gen.max_tasks, "0 for no cap")->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("--count", gen.count)->check(CLI::PositiveNumber);
  g->add_option("--out-dir", gen.out_dir)->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Run solvers over an instance directory");
  b->add_option("--instances", bench.instances, "Directory written by generate")->required();
  b->add_option("--algorithms", bench.algorithms, "Comma-separated list");
  b->add_option("--timeout-seconds", bench.timeout)->check(CLI::PositiveNumber);
  b->add_option("--csv", bench.csv, "Per-run CSV output");
  b->add_option("--workers", bench.workers, "Worker threads, 0 = hardware threads")->check(CLI::NonNegativeNumber);

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Check a solution file");
  v->add_option("--map", verify.map)->required();
  v->add_option("--problem", verify.problem)->required();
  v->add_option("--solution", verify.solution)->required();

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "Exhaustive optimal makespan for tiny problems");
  o->add_option("--map", oracle.map)->required();
  o->add_option("--problem", oracle.problem)->required();
  o->add_option("--budget", oracle.budget, "Expanded-state limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  if (*s) return run_solve(solve);
  if (*g) return run_generate(gen);
  if (*b) return run_bench(bench);
  if (*v) return run_verify(verify);
  return run_oracle(oracle);
}
