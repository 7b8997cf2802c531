// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "corruptions.hpp"
#include "oracles.hpp"
#include "pcmapf/bench.hpp"
#include "pcmapf/hcbs.hpp"
#include "pcmapf/pccbs.hpp"
#include "pcmapf/verify.hpp"
#include "support.hpp"

using namespace pcmapf;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// Every solver output seen anywhere in the run goes through here.
struct Audit {
  int checked = 0;
  std::vector<std::string> rejected;
  // Jointly solved (PC-CBS, H-CBS) makespan pairs from every suite.
  std::vector<std::pair<Time, Time>> pairs;

  bool accept(const std::string& where, const Problem& p, const SolveResult& r) {
    if (r.status != SolveStatus::Solved) return true;
    ++checked;
    ValidationReport rep = validate_solution(p, *r.solution);
    if (!rep.ok) rejected.push_back(where + " " + r.algorithm + ": " + rep.summary());
    return rep.ok;
  }
};

Audit audit;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct OracleSuite {
  int compared = 0;
  int mismatches = 0;
  int skipped = 0;
  std::set<int> degrees;
  std::string first_mismatch;
};

OracleSuite oracle_suite(uint64_t first_seed, const fixtures::SmallInstanceSpec& spec, int want) {
  OracleSuite s;
  for (uint64_t seed = first_seed; s.compared < want && seed < first_seed + 4 * want; ++seed) {
    Problem p = fixtures::random_small_instance(seed, spec);
    OracleResult o = oracle_makespan(p);
    if (o.status != OracleStatus::Solved) {
      ++s.skipped;
      continue;
    }
    SolveResult pc = solve_pccbs(p);
    SolveResult h = solve_hcbs(p, {.timeout_seconds = 60, .max_ct_nodes = kNodeCap});
    std::string where = "seed " + std::to_string(seed);
    audit.accept(where, p, pc);
    audit.accept(where, p, h);
    ++s.compared;
    s.degrees.insert(p.max_coalition_degree());
    Time got = pc.status == SolveStatus::Solved ? pc.solution->makespan() : -1;
    if (got != o.makespan) {
      if (!s.mismatches) s.first_mismatch = fmt("seed %llu: pc-cbs %d, oracle %d", (unsigned long long)seed, got, o.makespan);
      ++s.mismatches;
    }
    if (got >= 0 && h.status == SolveStatus::Solved) audit.pairs.emplace_back(got, h.solution->makespan());
  }
  return s;
}

Verdict criterion1() {
  OracleSuite s = oracle_suite(1, {}, 200);
  std::string degrees;
  for (int d : s.degrees) degrees += (degrees.empty() ? "" : ",") + std::to_string(d);
  bool ok = s.compared >= 200 && s.mismatches == 0 && s.degrees.count(1) && s.degrees.count(2);
  return {ok, fmt("%d instances compared (degrees %s, %d over oracle budget), %d mismatches %s", s.compared,
                  degrees.c_str(), s.skipped, s.mismatches, s.first_mismatch.c_str())};
}

Verdict criterion2() {
  fixtures::SmallInstanceSpec spec;
  spec.degrees = {2};
  OracleSuite s = oracle_suite(100000, spec, 60);
  bool ok = s.compared >= 50 && s.mismatches == 0 && s.degrees == std::set<int>{2};
  return {ok, fmt("%d coalition instances compared (%d over oracle budget), %d mismatches %s", s.compared, s.skipped,
                  s.mismatches, s.first_mismatch.c_str())};
}

Verdict criterion3() {
  Problem p = fixtures::four_way_coalition();
  TaskGraph g = TaskGraph::build(p);
  IntervalTable iv = initialize_intervals(g);
  iv[g.carry_node(0)].start = {0, kInfinity};
  auto conflict = detect_precedence_conflict(p, g, fixtures::staggered_paths(p, {5, 10, 7, 12}));
  if (!conflict) return {false, "no precedence conflict detected"};
  IntervalSplit split = resolve_precedence_conflict(iv, *conflict);
  bool ok = split.node == g.carry_node(0) && split.start_side && split.children[0] == Interval{0, 11} &&
            split.children[1] == Interval{12, kInfinity};
  auto show = [](Interval i) { return i.max_time >= kInfinity ? fmt("[%d,inf)", i.min_time) : fmt("[%d,%d]", i.min_time, i.max_time); };
  return {ok, "children " + show(split.children[0]) + " " + show(split.children[1])};
}

Verdict criterion4() {
  Problem p = fixtures::relay_problem();
  TaskGraph g = TaskGraph::build(p);
  IntervalTable iv = initialize_intervals(g);
  Time carry2 = iv[g.carry_node(1)].start.min_time;
  Time reach = p.env->distances.at(p.agents[1].start, p.tasks[1].pickup);
  return {carry2 == 4 && reach == 2, fmt("CARRY-2 start.min %d, agent 2 reaches its pickup at %d", carry2, reach)};
}

Verdict criterion5() {
  Problem p = fixtures::corridor_problem();
  OracleResult o = oracle_makespan(p);
  SolveResult pc = solve_pccbs(p);
  SolveResult h = solve_hcbs(p);
  audit.accept("corridor", p, pc);
  audit.accept("corridor", p, h);
  if (o.status != OracleStatus::Solved || pc.status != SolveStatus::Solved || h.status != SolveStatus::Solved)
    return {false, "a solver or the oracle failed on the corridor"};
  Time a = pc.solution->makespan(), b = h.solution->makespan();
  audit.pairs.emplace_back(a, b);
  return {a == o.makespan && b > a, fmt("oracle %d, pc-cbs %d, h-cbs %d", o.makespan, a, b)};
}

struct Regime {
  std::string name;
  std::string map;
  GeneratorMode mode;
  int agents, tasks, degree;
};

MetricsReport run_regime(const Regime& r, std::vector<std::string>& log) {
  auto env = fixtures::load_env(fixtures::map_dir() + "/" + r.map + ".map");
  std::vector<NamedInstance> instances;
  for (int i = 0; i < 100; ++i) {
    GeneratorConfig c;
    c.env = env;
    c.mode = r.mode;
    c.agent_count = r.agents;
    c.mean_tasks = r.tasks;
    c.coalition_degree = r.degree;
    c.seed = 1000 + i;
    instances.push_back({fmt("%s_%03d", r.name.c_str(), i), generate_instance(c)});
  }
  std::vector<std::string> algs{"pc-cbs", "h-cbs"};
  auto t0 = std::chrono::steady_clock::now();
  BenchmarkResult res = run_benchmark(instances, algs, 300, 1);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (size_t i = 0; i < instances.size(); ++i) {
    const RunRecord& pc = res.rows[2 * i];
    const RunRecord& h = res.rows[2 * i + 1];
    audit.checked += (pc.status == SolveStatus::Solved) + (h.status == SolveStatus::Solved);
    if (pc.status == SolveStatus::Solved && h.status == SolveStatus::Solved) audit.pairs.emplace_back(pc.makespan, h.makespan);
  }
  const MetricsReport& m = res.metrics;
  log.push_back(fmt("%s: solved %.2f/%.2f, pct_subopt %.1f%%, avg_regret %.3f (%.0fs)", r.name.c_str(), m.solved_pc,
                    m.solved_h, m.pct_subopt, m.avg_regret, secs));
  std::fprintf(stderr, "  %s\n", log.back().c_str());
  return m;
}

Verdict criterion7() {
  // run_benchmark validates every solved run and throws on a rejected plan.
  std::vector<std::string> log;
  MetricsReport empty = run_regime({"empty", "empty", GeneratorMode::Assembly, 2, 2, 1}, log);
  MetricsReport empty_dense = run_regime({"empty-3x2", "empty", GeneratorMode::Assembly, 3, 2, 1}, log);
  MetricsReport tunnel_dense = run_regime({"tunnel-3x2", "maze-tunnel", GeneratorMode::Assembly, 3, 2, 1}, log);
  MetricsReport cmapd = run_regime({"cmapd-deg3", "empty", GeneratorMode::Cmapd, 3, 2, 3}, log);
  bool a = empty.pct_subopt <= 5.0 && empty.avg_regret <= 0.1 && empty.solved_pc >= 0.95 && empty.solved_h >= 0.95;
  bool b = tunnel_dense.pct_subopt > empty_dense.pct_subopt && tunnel_dense.avg_regret > empty_dense.avg_regret;
  bool c = cmapd.pct_subopt == 0.0;
  std::string detail = fmt("(a) %s (b) %s (c) %s; ", a ? "ok" : "fail", b ? "ok" : "fail", c ? "ok" : "fail");
  for (size_t i = 0; i < log.size(); ++i) detail += (i ? "; " : "") + log[i];
  return {a && b && c, detail};
}

Verdict criterion6() {
  int negative = 0;
  for (auto [pc, h] : audit.pairs) negative += h < pc;
  std::vector<std::optional<Time>> pc{5, 6}, h{5, 8};
  MetricsReport m = compute_metrics(pc, h);
  bool formula = m.pct_subopt == 50.0 && m.avg_regret == 1.0;
  return {negative == 0 && formula && !audit.pairs.empty(),
          fmt("%zu jointly solved pairs, %d with negative regret; hand data gives %.0f%% and %.2f", audit.pairs.size(),
              negative, m.pct_subopt, m.avg_regret)};
}

Verdict criterion8() {
  auto domains = fixtures::corruption_domains();
  int bases_ok = 0;
  for (const auto& d : domains) bases_ok += validate_solution(d.problem, d.valid).ok;
  int caught = 0;
  std::string missed;
  auto catalogue = fixtures::corruption_catalogue(domains);
  for (const auto& c : catalogue) {
    ValidationReport r = validate_solution(c.domain->problem, c.solution);
    bool timed = c.expected_time < 0;
    for (const auto& v : r.violations) timed |= v.kind == c.expected && v.time == c.expected_time;
    if (!r.ok && r.has(c.expected) && timed)
      ++caught;
    else
      missed += " " + c.name;
  }
  // Cover suites that may not have run in this invocation.
  for (int i = 0; i < 20; ++i) {
    Problem p = fixtures::random_small_instance(200000 + i);
    audit.accept("extra", p, solve_pccbs(p));
    audit.accept("extra", p, solve_hcbs(p, {.timeout_seconds = 60, .max_ct_nodes = kNodeCap}));
  }
  bool ok = caught == static_cast<int>(catalogue.size()) && catalogue.size() == 20 &&
            bases_ok == static_cast<int>(domains.size()) && audit.rejected.empty();
  std::string detail = fmt("%d/%zu corruptions rejected with the right kind, %d solver outputs checked, %zu rejected",
                           caught, catalogue.size(), audit.checked, audit.rejected.size());
  if (!missed.empty()) detail += "; missed:" + missed;
  if (!audit.rejected.empty()) detail += "; first rejection: " + audit.rejected.front();
  return {ok, detail};
}

Verdict criterion9() {
  int differences = 0, compared = 0;
  auto env = fixtures::load_env(fixtures::map_dir() + "/warehouse.map");
  std::vector<NamedInstance> instances;
  for (int i = 0; i < 10; ++i) {
    GeneratorConfig c;
    c.env = env;
    c.agent_count = 3;
    c.seed = 500 + i;
    std::string a = format_problem(generate_instance(c)), b = format_problem(generate_instance(c));
    ++compared;
    differences += a != b;
    instances.push_back({fmt("w%d", i), generate_instance(c)});
  }
  for (int i = 0; i < 20; ++i) {
    Problem p = fixtures::random_small_instance(300000 + i);
    for (auto* solve : {+[](const Problem& q) { return solve_pccbs(q); }, +[](const Problem& q) { return solve_hcbs(q); }}) {
      SolveResult x = solve(p), y = solve(p);
      ++compared;
      bool same = x.status == y.status && x.stats.ct_nodes == y.stats.ct_nodes && x.stats.ll_expansions == y.stats.ll_expansions;
      if (same && x.solution) same = format_solution(p, *x.solution) == format_solution(p, *y.solution);
      differences += !same;
    }
  }
  std::vector<std::string> algs{"pc-cbs", "h-cbs"};
  BenchmarkResult r1 = run_benchmark(instances, algs, 60, 1), r2 = run_benchmark(instances, algs, 60, 1);
  for (size_t i = 0; i < r1.rows.size(); ++i) {
    const RunRecord &a = r1.rows[i], &b = r2.rows[i];
    ++compared;
    differences += !(a.instance == b.instance && a.status == b.status && a.makespan == b.makespan &&
                     a.ct_nodes == b.ct_nodes && a.ll_expansions == b.ll_expansions && a.solution_text == b.solution_text);
  }
  return {differences == 0, fmt("%d repeated runs compared (timings excluded), %d differ", compared, differences)};
}

Verdict criterion10() {
  long long pairs = 0, wrong = 0;
  for (const auto& name : fixtures::shipped_maps()) {
    Environment env(GridMap::load(fixtures::map_dir() + "/" + name + ".map"));
    for (VertexId u = 0; u < env.graph.size(); ++u) {
      std::vector<Time> ref = oracle::bfs_from(env.graph, u);
      for (VertexId v = 0; v < env.graph.size(); ++v, ++pairs) wrong += env.distances.at(u, v) != ref[v];
    }
  }
  return {wrong == 0, fmt("%lld vertex pairs over %zu maps, %lld differ from BFS", pairs, fixtures::shipped_maps().size(), wrong)};
}

}  // namespace

int main(int argc, char** argv) {
  // Criterion 6 reads the pairs the others collect, and 8 reads the audit, so they run last.
  std::vector<std::pair<int, std::function<Verdict()>>> order{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {7, criterion7}, {9, criterion9}, {10, criterion10}, {6, criterion6}, {8, criterion8}};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  std::map<int, Verdict> verdicts;
  for (auto& [n, run] : order) {
    if (!wanted.empty() && !wanted.count(n)) continue;
    auto t0 = std::chrono::steady_clock::now();
    std::fprintf(stderr, "criterion %d ...\n", n);
    try {
      verdicts[n] = run();
    } catch (const std::exception& e) {
      verdicts[n] = {false, std::string("exception: ") + e.what()};
    }
    std::fprintf(stderr, "criterion %d done in %.1fs\n", n,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  int failed = 0;
  for (const auto& [n, v] : verdicts) {
    std::printf("%s criterion %d: %s\n", v.pass ? "PASS" : "FAIL", n, v.detail.c_str());
    failed += !v.pass;
  }
  std::fflush(stdout);
  return failed ? 1 : 0;
}
