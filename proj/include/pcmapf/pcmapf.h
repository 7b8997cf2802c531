/* C interface to the pc-mapf solver library. All handles are opaque; every
 * call that can fail returns a pcmapf_status and leaves a message that
 * pcmapf_last_error() reports for the calling thread. Strings handed out by
 * the library are released with pcmapf_string_free(). */
#ifndef PCMAPF_H
#define PCMAPF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PCMAPF_API __declspec(dllexport)
#else
#define PCMAPF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pcmapf_status {
  PCMAPF_OK = 0,
  PCMAPF_UNSOLVED = 1,          /* timeout, exhausted search, infeasible, oracle budget */
  PCMAPF_INVALID_INPUT = 2,     /* unreadable or malformed map/problem/solution, bad argument */
  PCMAPF_VALIDATION_FAILED = 3, /* a plan broke the rules */
  PCMAPF_INTERNAL_ERROR = 4
} pcmapf_status;

typedef struct pcmapf_map pcmapf_map;
typedef struct pcmapf_problem pcmapf_problem;
typedef struct pcmapf_solution pcmapf_solution;

PCMAPF_API const char* pcmapf_last_error(void);
PCMAPF_API void pcmapf_string_free(char* s);

/* Maps: grid plus its all-pairs distance table. */
PCMAPF_API pcmapf_status pcmapf_map_load(const char* path, pcmapf_map** out);
PCMAPF_API pcmapf_status pcmapf_map_parse(const char* text, pcmapf_map** out);
PCMAPF_API void pcmapf_map_free(pcmapf_map* map);
PCMAPF_API int pcmapf_map_vertex_count(const pcmapf_map* map);
/* Shortest path length between two free cells, -1 when unreachable or not free. */
PCMAPF_API int pcmapf_map_distance(const pcmapf_map* map, int r1, int c1, int r2, int c2);

/* Problems keep their map alive. */
PCMAPF_API pcmapf_status pcmapf_problem_load(const pcmapf_map* map, const char* path, pcmapf_problem** out);
PCMAPF_API pcmapf_status pcmapf_problem_parse(const pcmapf_map* map, const char* text, pcmapf_problem** out);
PCMAPF_API void pcmapf_problem_free(pcmapf_problem* problem);
PCMAPF_API int pcmapf_problem_agent_count(const pcmapf_problem* problem);
PCMAPF_API int pcmapf_problem_task_count(const pcmapf_problem* problem);
PCMAPF_API char* pcmapf_problem_format(const pcmapf_problem* problem);

/* algorithm: "pc-cbs" or "h-cbs". Returns PCMAPF_OK with *out set when a plan
 * was found, PCMAPF_UNSOLVED otherwise (*out stays NULL). */
PCMAPF_API pcmapf_status pcmapf_solve(const pcmapf_problem* problem, const char* algorithm, double timeout_seconds,
                                      pcmapf_solution** out);
PCMAPF_API pcmapf_status pcmapf_solution_load(const pcmapf_problem* problem, const char* path,
                                              pcmapf_solution** out);
PCMAPF_API void pcmapf_solution_free(pcmapf_solution* solution);
PCMAPF_API int pcmapf_solution_makespan(const pcmapf_solution* solution);
/* Solution file text; with_stats adds the ct_nodes/ll_expansions/runtime_ms/algorithm trailer. */
PCMAPF_API char* pcmapf_solution_format(const pcmapf_solution* solution, int with_stats);

/* PCMAPF_OK when the plan is valid, PCMAPF_VALIDATION_FAILED otherwise. *report
 * (optional) receives one line per violation: "<kind> t=<t>: <detail>". */
PCMAPF_API pcmapf_status pcmapf_validate(const pcmapf_problem* problem, const pcmapf_solution* solution,
                                         char** report);

/* Exhaustive optimum. PCMAPF_UNSOLVED when infeasible or over budget. */
PCMAPF_API pcmapf_status pcmapf_oracle(const pcmapf_problem* problem, uint64_t budget, int* makespan);

typedef struct pcmapf_generator_config {
  const char* mode; /* "assembly" or "cmapd" */
  int agents;
  int mean_tasks;
  int coalition_degree;
  double edge_probability;
  uint64_t seed;
  int max_tasks_per_agent; /* 0: no cap */
} pcmapf_generator_config;

PCMAPF_API void pcmapf_generator_defaults(pcmapf_generator_config* config);
PCMAPF_API pcmapf_status pcmapf_generate(const pcmapf_map* map, const pcmapf_generator_config* config,
                                         pcmapf_problem** out);
/* Writes map.map and instance_<i>.problem for i in [0, count) into dir,
 * instance i generated with seed config->seed + i. */
PCMAPF_API pcmapf_status pcmapf_generate_dir(const pcmapf_map* map, const pcmapf_generator_config* config, int count,
                                             const char* dir);

typedef struct pcmapf_metrics {
  int instances;
  int jointly_solved;
  double solved_pc;
  double solved_h;
  double pct_subopt;
  double avg_regret;
} pcmapf_metrics;

/* algorithms: comma-separated list. csv_path may be NULL. workers <= 0 uses
 * one per hardware thread. PCMAPF_VALIDATION_FAILED aborts the run. */
PCMAPF_API pcmapf_status pcmapf_bench(const char* instance_dir, const char* algorithms, double timeout_seconds,
                                      int workers, const char* csv_path, pcmapf_metrics* metrics);

#ifdef __cplusplus
}
#endif

#endif /* PCMAPF_H */
