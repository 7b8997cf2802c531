#include "pcmapf/pcmapf.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "pcmapf/bench.hpp"
#include "pcmapf/verify.hpp"

struct pcmapf_map {
  std::shared_ptr<const pcmapf::Environment> env;
};

struct pcmapf_problem {
  pcmapf::Problem problem;
};

struct pcmapf_solution {
  pcmapf::Problem problem;
  pcmapf::Solution solution;
  pcmapf::SolveStats stats;
  std::string algorithm;
};

namespace {

thread_local std::string last_error;

pcmapf_status fail(pcmapf_status status, const std::string& message) {
  last_error = message;
  return status;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Runs body and maps exceptions to status codes.
template <typename Body>
pcmapf_status guarded(Body&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const pcmapf::ParseError& e) {
    return fail(PCMAPF_INVALID_INPUT, e.what());
  } catch (const pcmapf::InvalidProblem& e) {
    return fail(PCMAPF_INVALID_INPUT, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PCMAPF_INVALID_INPUT, e.what());
  } catch (const pcmapf::ValidatorGateError& e) {
    return fail(PCMAPF_VALIDATION_FAILED, e.what());
  } catch (const std::exception& e) {
    return fail(PCMAPF_INTERNAL_ERROR, e.what());
  }
}

bool null_args(std::initializer_list<const void*> args) {
  for (const void* p : args)
    if (!p) return true;
  return false;
}

pcmapf::GeneratorConfig to_config(const pcmapf_map* map, const pcmapf_generator_config* c) {
  pcmapf::GeneratorConfig cfg;
  cfg.env = map->env;
  auto mode = pcmapf::parse_generator_mode(c->mode ? c->mode : "");
  if (!mode) throw std::invalid_argument("mode must be 'assembly' or 'cmapd'");
  cfg.mode = *mode;
  cfg.agent_count = c->agents;
  cfg.mean_tasks = c->mean_tasks;
  cfg.coalition_degree = c->coalition_degree;
  cfg.explicit_edge_probability = c->edge_probability;
  cfg.seed = c->seed;
  cfg.max_tasks_per_agent = c->max_tasks_per_agent;
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

extern "C" {

const char* pcmapf_last_error(void) { return last_error.c_str(); }

void pcmapf_string_free(char* s) { std::free(s); }

pcmapf_status pcmapf_map_parse(const char* text, pcmapf_map** out) {
  if (null_args({text, out})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    *out = new pcmapf_map{std::make_shared<const pcmapf::Environment>(pcmapf::GridMap::parse(text))};
    return PCMAPF_OK;
  });
}

pcmapf_status pcmapf_map_load(const char* path, pcmapf_map** out) {
  if (null_args({path, out})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    std::string text;
    try {
      text = pcmapf::read_file(path);
    } catch (const std::exception& e) {
      return fail(PCMAPF_INVALID_INPUT, e.what());
    }
    return pcmapf_map_parse(text.c_str(), out);
  });
}

void pcmapf_map_free(pcmapf_map* map) { delete map; }

int pcmapf_map_vertex_count(const pcmapf_map* map) { return map ? map->env->graph.size() : 0; }

int pcmapf_map_distance(const pcmapf_map* map, int r1, int c1, int r2, int c2) {
  if (!map) return -1;
  const auto& g = map->env->graph;
  pcmapf::VertexId u = g.vertex_at({r1, c1}), v = g.vertex_at({r2, c2});
  if (u == pcmapf::kNoVertex || v == pcmapf::kNoVertex || !map->env->distances.reachable(u, v)) return -1;
  return map->env->distances.at(u, v);
}

pcmapf_status pcmapf_problem_parse(const pcmapf_map* map, const char* text, pcmapf_problem** out) {
  if (null_args({map, text, out})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    *out = new pcmapf_problem{pcmapf::parse_problem(map->env, text)};
    return PCMAPF_OK;
  });
}

pcmapf_status pcmapf_problem_load(const pcmapf_map* map, const char* path, pcmapf_problem** out) {
  if (null_args({map, path, out})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    std::string text;
    try {
      text = pcmapf::read_file(path);
    } catch (const std::exception& e) {
      return fail(PCMAPF_INVALID_INPUT, e.what());
    }
    return pcmapf_problem_parse(map, text.c_str(), out);
  });
}

void pcmapf_problem_free(pcmapf_problem* problem) { delete problem; }

int pcmapf_problem_agent_count(const pcmapf_problem* problem) { return problem ? problem->problem.agent_count() : 0; }

int pcmapf_problem_task_count(const pcmapf_problem* problem) { return problem ? problem->problem.task_count() : 0; }

char* pcmapf_problem_format(const pcmapf_problem* problem) {
  return problem ? copy_string(pcmapf::format_problem(problem->problem)) : nullptr;
}

pcmapf_status pcmapf_solve(const pcmapf_problem* problem, const char* algorithm, double timeout_seconds,
                           pcmapf_solution** out) {
  if (null_args({problem, algorithm, out})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  *out = nullptr;
  return guarded([&] {
    pcmapf::SolveResult res = pcmapf::solve_with(problem->problem, algorithm, timeout_seconds);
    if (res.status != pcmapf::SolveStatus::Solved || !res.solution)
      return fail(PCMAPF_UNSOLVED, std::string(algorithm) + ": " + pcmapf::to_string(res.status));
    *out = new pcmapf_solution{problem->problem, std::move(*res.solution), res.stats, res.algorithm};
    return PCMAPF_OK;
  });
}

pcmapf_status pcmapf_solution_load(const pcmapf_problem* problem, const char* path, pcmapf_solution** out) {
  if (null_args({problem, path, out})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    std::string text;
    try {
      text = pcmapf::read_file(path);
    } catch (const std::exception& e) {
      return fail(PCMAPF_INVALID_INPUT, e.what());
    }
    *out = new pcmapf_solution{problem->problem, pcmapf::parse_solution(problem->problem, text), {}, {}};
    return PCMAPF_OK;
  });
}

void pcmapf_solution_free(pcmapf_solution* solution) { delete solution; }

int pcmapf_solution_makespan(const pcmapf_solution* solution) {
  return solution ? solution->solution.makespan() : -1;
}

char* pcmapf_solution_format(const pcmapf_solution* solution, int with_stats) {
  if (!solution) return nullptr;
  return copy_string(pcmapf::format_solution(solution->problem, solution->solution,
                                             with_stats ? &solution->stats : nullptr,
                                             with_stats ? solution->algorithm : std::string()));
}

pcmapf_status pcmapf_validate(const pcmapf_problem* problem, const pcmapf_solution* solution, char** report) {
  if (null_args({problem, solution})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    pcmapf::ValidationReport r = pcmapf::validate_solution(problem->problem, solution->solution);
    if (report) *report = copy_string(r.summary());
    return r.ok ? PCMAPF_OK : fail(PCMAPF_VALIDATION_FAILED, "plan has violations");
  });
}

pcmapf_status pcmapf_oracle(const pcmapf_problem* problem, uint64_t budget, int* makespan) {
  if (null_args({problem, makespan})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    pcmapf::OracleResult r = pcmapf::oracle_makespan(problem->problem, budget);
    switch (r.status) {
      case pcmapf::OracleStatus::Solved:
        *makespan = r.makespan;
        return PCMAPF_OK;
      case pcmapf::OracleStatus::Infeasible:
        return fail(PCMAPF_UNSOLVED, "no solution exists");
      case pcmapf::OracleStatus::BudgetExceeded:
        break;
    }
    return fail(PCMAPF_UNSOLVED, "state budget exceeded after " + std::to_string(r.expanded) + " expansions");
  });
}

void pcmapf_generator_defaults(pcmapf_generator_config* config) {
  if (!config) return;
  *config = pcmapf_generator_config{"assembly", 2, 2, 1, 0.3, 0, 0};
}

pcmapf_status pcmapf_generate(const pcmapf_map* map, const pcmapf_generator_config* config, pcmapf_problem** out) {
  if (null_args({map, config, out})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    *out = new pcmapf_problem{pcmapf::generate_instance(to_config(map, config))};
    return PCMAPF_OK;
  });
}

pcmapf_status pcmapf_generate_dir(const pcmapf_map* map, const pcmapf_generator_config* config, int count,
                                  const char* dir) {
  if (null_args({map, config, dir})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    namespace fs = std::filesystem;
    pcmapf::GeneratorConfig cfg = to_config(map, config);
    fs::create_directories(dir);
    write_text(fs::path(dir) / "map.map", map->env->graph.map().to_string());
    for (int i = 0; i < count; ++i) {
      cfg.seed = config->seed + static_cast<uint64_t>(i);
      std::ostringstream name;
      name << "instance_" << std::string(i < 10 ? "00" : i < 100 ? "0" : "") << i << ".problem";
      write_text(fs::path(dir) / name.str(), pcmapf::format_problem(pcmapf::generate_instance(cfg)));
    }
    return PCMAPF_OK;
  });
}

pcmapf_status pcmapf_bench(const char* instance_dir, const char* algorithms, double timeout_seconds, int workers,
                           const char* csv_path, pcmapf_metrics* metrics) {
  if (null_args({instance_dir, algorithms})) return fail(PCMAPF_INVALID_INPUT, "null argument");
  return guarded([&] {
    std::vector<pcmapf::NamedInstance> instances;
    try {
      instances = pcmapf::load_instance_dir(instance_dir);
    } catch (const std::filesystem::filesystem_error& e) {
      return fail(PCMAPF_INVALID_INPUT, e.what());
    } catch (const std::runtime_error& e) {
      if (dynamic_cast<const pcmapf::ParseError*>(&e) || dynamic_cast<const pcmapf::InvalidProblem*>(&e)) throw;
      return fail(PCMAPF_INVALID_INPUT, e.what());
    }
    std::vector<std::string> algs;
    std::stringstream list(algorithms);
    for (std::string a; std::getline(list, a, ',');)
      if (!a.empty()) algs.push_back(a);
    pcmapf::BenchmarkResult res = pcmapf::run_benchmark(instances, algs, timeout_seconds, workers);
    if (csv_path) write_text(csv_path, pcmapf::format_csv(res.rows));
    if (metrics) {
      const auto& m = res.metrics;
      *metrics = pcmapf_metrics{m.instances, m.jointly_solved, m.solved_pc, m.solved_h, m.pct_subopt, m.avg_regret};
    }
    return PCMAPF_OK;
  });
}

}  // extern "C"
