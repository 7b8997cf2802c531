#include "pcmapf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <thread>

#include "pcmapf/hcbs.hpp"
#include "pcmapf/pccbs.hpp"
#include "pcmapf/taskgraph.hpp"
#include "pcmapf/verify.hpp"

namespace pcmapf {

std::optional<GeneratorMode> parse_generator_mode(std::string_view name) {
  if (name == "assembly") return GeneratorMode::Assembly;
  if (name == "cmapd") return GeneratorMode::Cmapd;
  return std::nullopt;
}

namespace {

struct AgentClock {
  VertexId at;
  Time free_at = 0;
  int assigned = 0;
};

// Nearest vertex (BFS order, neighbor order as in the motion graph) not in `taken`.
VertexId nearest_unclaimed(const MotionGraph& g, VertexId from, const std::vector<bool>& taken) {
  std::vector<bool> seen(g.size(), false);
  std::queue<VertexId> q;
  q.push(from);
  seen[from] = true;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    if (!taken[v]) return v;
    for (VertexId n : g.neighbors(v))
      if (!seen[n]) {
        seen[n] = true;
        q.push(n);
      }
  }
  return kNoVertex;
}

}  // namespace

Problem generate_instance(const GeneratorConfig& cfg) {
  if (!cfg.env) throw InvalidProblem("generator needs a map");
  if (cfg.agent_count < 1 || cfg.coalition_degree < 1 || cfg.coalition_degree > cfg.agent_count)
    throw InvalidProblem("need agents >= coalition degree >= 1");
  if (cfg.mean_tasks < 1) throw InvalidProblem("mean tasks must be >= 1");
  const MotionGraph& g = cfg.env->graph;
  const DistanceTable& dist = cfg.env->distances;
  std::mt19937_64 rng(cfg.seed);

  int slots = 0;
  std::uniform_int_distribution<int> draw(-1, 1);
  for (int a = 0; a < cfg.agent_count; ++a) slots += std::max(1, cfg.mean_tasks + draw(rng));
  int task_count = std::max(1, slots / cfg.coalition_degree);
  if (cfg.max_tasks_per_agent > 0)
    task_count = std::max(1, std::min(task_count, cfg.agent_count * cfg.max_tasks_per_agent / cfg.coalition_degree));
  if (cfg.agent_count + 2 * task_count > g.size())
    throw InvalidProblem("map has too few free cells for " + std::to_string(cfg.agent_count) + " agents and " +
                         std::to_string(task_count) + " tasks");

  std::vector<VertexId> cells(g.size());
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);

  Problem p;
  p.env = cfg.env;
  size_t next = 0;
  for (int a = 0; a < cfg.agent_count; ++a) p.agents.push_back({a + 1, cells[next++], kNoVertex});
  for (int t = 0; t < task_count; ++t) {
    Task task;
    task.id = t + 1;
    task.pickup = cells[next++];
    task.delivery = cells[next++];
    p.tasks.push_back(task);
  }
  if (cfg.mode == GeneratorMode::Assembly) {
    std::bernoulli_distribution coin(cfg.explicit_edge_probability);
    for (int i = 0; i < task_count; ++i)
      for (int j = i + 1; j < task_count; ++j)
        if (coin(rng)) p.edges.emplace_back(i, j);
  }

  // Greedy assignment: among tasks whose explicit predecessors are assigned,
  // take the one that can start earliest with the agents that reach it first.
  std::vector<AgentClock> clock;
  for (const auto& a : p.agents) clock.push_back({a.start});
  std::vector<Time> finished(task_count, -1);
  std::vector<bool> assigned(task_count, false);
  p.allotments.assign(cfg.agent_count, {});
  for (int round = 0; round < task_count; ++round) {
    int best_task = -1;
    Time best_start = kInfinity;
    std::vector<int> best_team;
    for (int t = 0; t < task_count; ++t) {
      if (assigned[t]) continue;
      Time ready = 0;
      bool blocked = false;
      for (auto [before, after] : p.edges)
        if (after == t) {
          if (!assigned[before]) blocked = true;
          else ready = std::max(ready, finished[before]);
        }
      if (blocked) continue;
      std::vector<std::pair<Time, int>> arrivals;
      for (int a = 0; a < cfg.agent_count; ++a) {
        if (cfg.max_tasks_per_agent > 0 && clock[a].assigned >= cfg.max_tasks_per_agent) continue;
        Time d = dist.at(clock[a].at, p.tasks[t].pickup);
        if (d >= kInfinity) continue;
        arrivals.emplace_back(clock[a].free_at + d, a);
      }
      if (static_cast<int>(arrivals.size()) < cfg.coalition_degree) continue;
      std::sort(arrivals.begin(), arrivals.end());
      Time start = std::max(ready, arrivals[cfg.coalition_degree - 1].first);
      if (start < best_start) {
        best_start = start;
        best_task = t;
        best_team.clear();
        for (int i = 0; i < cfg.coalition_degree; ++i) best_team.push_back(arrivals[i].second);
      }
    }
    if (best_task < 0) throw InvalidProblem("greedy assignment could not place every task");
    std::sort(best_team.begin(), best_team.end());
    Task& task = p.tasks[best_task];
    task.coalition = best_team;
    assigned[best_task] = true;
    Time carry = dist.at(task.pickup, task.delivery);
    if (carry >= kInfinity) throw InvalidProblem("task delivery unreachable from its pickup");
    finished[best_task] = best_start + carry;
    for (int a : best_team) {
      p.allotments[a].push_back(best_task);
      clock[a] = {task.delivery, finished[best_task], clock[a].assigned + 1};
    }
  }

  // Parking: last delivery if nobody claimed it, else the own start, else the
  // nearest free unclaimed cell.
  std::vector<bool> taken(g.size(), false);
  for (int a = 0; a < cfg.agent_count; ++a) {
    VertexId want = p.allotments[a].empty() ? p.agents[a].start : p.tasks[p.allotments[a].back()].delivery;
    if (taken[want]) want = p.agents[a].start;
    if (taken[want]) want = nearest_unclaimed(g, want, taken);
    if (want == kNoVertex) throw InvalidProblem("no parking vertex left");
    taken[want] = true;
    p.agents[a].park = want;
  }
  screen_instance(p);
  return p;
}

void screen_instance(const Problem& p) {
  p.check_consistency();
  try {
    TaskGraph graph = TaskGraph::build(p);
    initialize_intervals(graph);
  } catch (const InfeasibleProblem& e) {
    throw InvalidProblem(std::string("instance fails the feasibility screen: ") + e.what());
  }
  const DistanceTable& dist = p.distances();
  for (int a = 0; a < p.agent_count(); ++a) {
    VertexId at = p.agents[a].start;
    for (int t : p.allotments[a]) at = p.tasks[t].delivery;
    if (!dist.reachable(at, p.agents[a].park)) throw InvalidProblem("parking vertex unreachable");
  }
  std::vector<bool> parked(p.graph().size(), false);
  for (const auto& a : p.agents) {
    if (parked[a.park]) throw InvalidProblem("two agents share a parking vertex");
    parked[a.park] = true;
  }
}

MetricsReport compute_metrics(std::span<const std::optional<Time>> pc, std::span<const std::optional<Time>> h) {
  MetricsReport m;
  m.instances = static_cast<int>(std::max(pc.size(), h.size()));
  if (m.instances == 0) return m;
  int solved_pc = 0, solved_h = 0, worse = 0;
  long long regret = 0;
  for (int i = 0; i < m.instances; ++i) {
    bool a = i < static_cast<int>(pc.size()) && pc[i];
    bool b = i < static_cast<int>(h.size()) && h[i];
    solved_pc += a;
    solved_h += b;
    if (a && b) {
      ++m.jointly_solved;
      regret += *h[i] - *pc[i];
      if (*h[i] > *pc[i]) ++worse;
    }
  }
  m.solved_pc = static_cast<double>(solved_pc) / m.instances;
  m.solved_h = static_cast<double>(solved_h) / m.instances;
  if (m.jointly_solved > 0) {
    m.pct_subopt = 100.0 * worse / m.jointly_solved;
    m.avg_regret = static_cast<double>(regret) / m.jointly_solved;
  }
  return m;
}

std::vector<NamedInstance> load_instance_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  auto env = std::make_shared<const Environment>(GridMap::load((fs::path(dir) / "map.map").string()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".problem") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<NamedInstance> out;
  for (const auto& f : files) out.push_back({f.stem().string(), load_problem(env, f.string())});
  return out;
}

SolveResult solve_with(const Problem& problem, std::string_view algorithm, double timeout_seconds,
                       uint64_t max_ct_nodes) {
  if (algorithm == "pc-cbs") {
    PcCbsOptions opt;
    opt.timeout_seconds = timeout_seconds;
    opt.max_ct_nodes = max_ct_nodes;
    return solve_pccbs(problem, opt);
  }
  if (algorithm == "h-cbs") {
    HcbsOptions opt;
    opt.timeout_seconds = timeout_seconds;
    opt.max_ct_nodes = max_ct_nodes;
    return solve_hcbs(problem, opt);
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(algorithm) + "'");
}

BenchmarkResult run_benchmark(std::span<const NamedInstance> instances, std::span<const std::string> algorithms,
                              double timeout_seconds, int workers) {
  for (const auto& alg : algorithms)
    if (alg != "pc-cbs" && alg != "h-cbs") throw std::invalid_argument("unknown algorithm '" + alg + "'");
  const size_t jobs = instances.size() * algorithms.size();
  std::vector<RunRecord> rows(jobs);
  std::atomic<size_t> next{0};
  std::atomic<bool> gate_failed{false};
  std::string gate_detail;
  std::mutex gate_mutex;

  auto work = [&] {
    for (size_t j; !gate_failed && (j = next++) < jobs;) {
      const NamedInstance& inst = instances[j / algorithms.size()];
      const std::string& alg = algorithms[j % algorithms.size()];
      SolveResult res = solve_with(inst.problem, alg, timeout_seconds);
      RunRecord& row = rows[j];
      row.instance = inst.name;
      row.algorithm = alg;
      row.status = res.status;
      row.runtime_ms = res.stats.runtime_ms;
      row.ct_nodes = res.stats.ct_nodes;
      row.ll_expansions = res.stats.ll_expansions;
      if (res.status == SolveStatus::Solved && res.solution) {
        row.makespan = res.solution->makespan();
        ValidationReport report = validate_solution(inst.problem, *res.solution);
        row.valid = report.ok;
        row.solution_text = format_solution(inst.problem, *res.solution, nullptr, alg);
        if (!report.ok) {
          std::lock_guard lock(gate_mutex);
          gate_failed = true;
          gate_detail = alg + " on " + inst.name + ":\n" + report.summary();
        }
      }
    }
  };
  int n = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = static_cast<int>(std::min<size_t>(n, std::max<size_t>(jobs, 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (gate_failed) throw ValidatorGateError("validator rejected a solver output: " + gate_detail);

  std::vector<std::optional<Time>> pc(instances.size()), h(instances.size());
  for (size_t j = 0; j < jobs; ++j) {
    const RunRecord& row = rows[j];
    if (row.status != SolveStatus::Solved) continue;
    (row.algorithm == "pc-cbs" ? pc : h)[j / algorithms.size()] = row.makespan;
  }
  BenchmarkResult out;
  out.rows = std::move(rows);
  out.metrics = compute_metrics(pc, h);
  return out;
}

std::string format_csv(std::span<const RunRecord> rows) {
  std::ostringstream out;
  out << "instance,algorithm,status,makespan,runtime_ms,ct_nodes,ll_expansions,valid\n";
  for (const auto& r : rows)
    out << r.instance << ',' << r.algorithm << ',' << to_string(r.status) << ','
        << (r.status == SolveStatus::Solved ? std::to_string(r.makespan) : std::string()) << ',' << r.runtime_ms
        << ',' << r.ct_nodes << ',' << r.ll_expansions << ',' << (r.valid ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace pcmapf
