#include "pcmapf/problem.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pcmapf {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

class LineReader {
 public:
  LineReader(std::vector<std::string_view> tokens, int line_no)
      : tokens_(std::move(tokens)), line_no_(line_no) {}

  bool done() const { return pos_ >= tokens_.size(); }

  void expect(std::string_view keyword) {
    if (done() || tokens_[pos_] != keyword)
      throw ParseError(line_no_, "expected '" + std::string(keyword) + "'");
    ++pos_;
  }

  int integer() {
    if (done()) throw ParseError(line_no_, "unexpected end of record");
    std::string_view tok = tokens_[pos_++];
    int value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(line_no_, "expected integer, got '" + std::string(tok) + "'");
    return value;
  }

  void finish() {
    if (!done()) throw ParseError(line_no_, "unexpected token '" + std::string(tokens_[pos_]) + "'");
  }

 private:
  std::vector<std::string_view> tokens_;
  size_t pos_ = 1;
  int line_no_;
};

VertexId free_vertex(const MotionGraph& graph, int row, int col, int line_no) {
  VertexId v = graph.vertex_at({row, col});
  if (v == kNoVertex)
    throw ParseError(line_no, "(" + std::to_string(row) + "," + std::to_string(col) +
                                  ") is not a free cell");
  return v;
}

}  // namespace

int Problem::allotment_index(int agent, int task) const {
  const auto& list = allotments[agent];
  auto it = std::find(list.begin(), list.end(), task);
  return it == list.end() ? -1 : static_cast<int>(it - list.begin());
}

int Problem::max_coalition_degree() const {
  int deg = 0;
  for (const auto& t : tasks) deg = std::max(deg, static_cast<int>(t.coalition.size()));
  return deg;
}

Time Problem::horizon() const {
  long long h = static_cast<long long>(graph().size()) * (task_count() + 1) *
                (max_coalition_degree() + 1);
  return static_cast<Time>(std::min<long long>(h, kInfinity - 1));
}

void Problem::check_consistency() const {
  const int n = agent_count();
  if (static_cast<int>(allotments.size()) != n)
    throw InvalidProblem("allotment table size does not match agent count");
  std::set<VertexId> starts, parks;
  for (const auto& a : agents) {
    if (!starts.insert(a.start).second)
      throw InvalidProblem("agent " + std::to_string(a.id) + " shares its start vertex");
    if (!parks.insert(a.park).second)
      throw InvalidProblem("agent " + std::to_string(a.id) + " shares its parking vertex");
  }
  for (int t = 0; t < task_count(); ++t) {
    const Task& task = tasks[t];
    if (task.coalition.empty())
      throw InvalidProblem("task " + std::to_string(task.id) + " has an empty coalition");
    for (int a : task.coalition) {
      if (a < 0 || a >= n) throw InvalidProblem("task " + std::to_string(task.id) + " names unknown agent");
      if (allotment_index(a, t) < 0)
        throw InvalidProblem("coalition member " + std::to_string(agents[a].id) +
                             " has no allotment entry for task " + std::to_string(task.id));
    }
  }
  std::vector<int> referenced(task_count(), 0);
  for (int a = 0; a < n; ++a) {
    std::set<int> seen;
    for (int t : allotments[a]) {
      if (t < 0 || t >= task_count()) throw InvalidProblem("allotment names unknown task");
      if (!seen.insert(t).second)
        throw InvalidProblem("agent " + std::to_string(agents[a].id) + " allots task " +
                             std::to_string(tasks[t].id) + " twice");
      const auto& co = tasks[t].coalition;
      if (std::find(co.begin(), co.end(), a) == co.end())
        throw InvalidProblem("agent " + std::to_string(agents[a].id) + " allots task " +
                             std::to_string(tasks[t].id) + " without being in its coalition");
      ++referenced[t];
    }
  }
  for (int t = 0; t < task_count(); ++t)
    if (referenced[t] == 0)
      throw InvalidProblem("task " + std::to_string(tasks[t].id) + " is referenced by no agent");
  for (auto [a, b] : edges) {
    if (a < 0 || a >= task_count() || b < 0 || b >= task_count())
      throw InvalidProblem("edge names unknown task");
    if (a == b) throw InvalidProblem("edge from a task to itself");
  }
  // Colour-marking DFS over the explicit edges alone.
  std::vector<std::vector<int>> out(task_count());
  for (auto [a, b] : edges) out[a].push_back(b);
  std::vector<int> colour(task_count(), 0);
  std::vector<std::pair<int, size_t>> stack;
  for (int root = 0; root < task_count(); ++root) {
    if (colour[root]) continue;
    colour[root] = 1;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next == out[v].size()) {
        colour[v] = 2;
        stack.pop_back();
        continue;
      }
      int w = out[v][next++];
      if (colour[w] == 1) throw InvalidProblem("explicit edges form a cycle through task " + std::to_string(tasks[w].id));
      if (colour[w] == 0) {
        colour[w] = 1;
        stack.push_back({w, 0});
      }
    }
  }
}

Problem parse_problem(std::shared_ptr<const Environment> env, std::string_view text) {
  Problem problem;
  problem.env = env;
  const MotionGraph& graph = env->graph;

  struct PendingTask {
    Task task;
    std::vector<int> coalition_ids;
    int line;
  };
  struct PendingAllot {
    int agent_id;
    std::vector<int> task_ids;
    int line;
  };
  std::vector<PendingTask> pending_tasks;
  std::vector<PendingAllot> pending_allots;
  std::vector<std::tuple<int, int, int>> pending_edges;
  std::map<int, int> agent_index;

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    std::string_view kind = tokens[0];
    LineReader in(tokens, line_no);
    if (kind == "agent") {
      AgentSpec a;
      a.id = in.integer();
      in.expect("start");
      int r = in.integer(), c = in.integer();
      a.start = free_vertex(graph, r, c, line_no);
      in.expect("park");
      r = in.integer();
      c = in.integer();
      a.park = free_vertex(graph, r, c, line_no);
      in.finish();
      if (!agent_index.emplace(a.id, problem.agent_count()).second)
        throw ParseError(line_no, "duplicate agent id " + std::to_string(a.id));
      problem.agents.push_back(a);
    } else if (kind == "task") {
      PendingTask p;
      p.line = line_no;
      p.task.id = in.integer();
      in.expect("pickup");
      int r = in.integer(), c = in.integer();
      p.task.pickup = free_vertex(graph, r, c, line_no);
      in.expect("deliver");
      r = in.integer();
      c = in.integer();
      p.task.delivery = free_vertex(graph, r, c, line_no);
      in.expect("coalition");
      while (!in.done()) p.coalition_ids.push_back(in.integer());
      if (p.coalition_ids.empty()) throw ParseError(line_no, "empty coalition");
      pending_tasks.push_back(std::move(p));
    } else if (kind == "edge") {
      int a = in.integer(), b = in.integer();
      in.finish();
      pending_edges.emplace_back(a, b, line_no);
    } else if (kind == "allot") {
      PendingAllot p;
      p.line = line_no;
      p.agent_id = in.integer();
      while (!in.done()) p.task_ids.push_back(in.integer());
      pending_allots.push_back(std::move(p));
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(kind) + "'");
    }
    if (end == text.size()) break;
  }

  std::map<int, int> task_index;
  for (auto& p : pending_tasks) {
    if (!task_index.emplace(p.task.id, problem.task_count()).second)
      throw ParseError(p.line, "duplicate task id " + std::to_string(p.task.id));
    for (int id : p.coalition_ids) {
      auto it = agent_index.find(id);
      if (it == agent_index.end()) throw ParseError(p.line, "unknown agent " + std::to_string(id));
      p.task.coalition.push_back(it->second);
    }
    std::sort(p.task.coalition.begin(), p.task.coalition.end());
    if (std::adjacent_find(p.task.coalition.begin(), p.task.coalition.end()) != p.task.coalition.end())
      throw ParseError(p.line, "agent listed twice in coalition");
    problem.tasks.push_back(std::move(p.task));
  }
  auto lookup_task = [&](int id, int line) {
    auto it = task_index.find(id);
    if (it == task_index.end()) throw ParseError(line, "unknown task " + std::to_string(id));
    return it->second;
  };
  for (auto [a, b, line] : pending_edges) problem.edges.emplace_back(lookup_task(a, line), lookup_task(b, line));
  problem.allotments.assign(problem.agents.size(), {});
  std::vector<bool> allotted(problem.agents.size(), false);
  for (const auto& p : pending_allots) {
    auto it = agent_index.find(p.agent_id);
    if (it == agent_index.end()) throw ParseError(p.line, "unknown agent " + std::to_string(p.agent_id));
    if (allotted[it->second]) throw ParseError(p.line, "second allot record for agent");
    allotted[it->second] = true;
    for (int id : p.task_ids) problem.allotments[it->second].push_back(lookup_task(id, p.line));
  }
  if (problem.agents.empty()) throw InvalidProblem("problem has no agents");
  problem.check_consistency();
  return problem;
}

Problem load_problem(std::shared_ptr<const Environment> env, const std::string& path) {
  return parse_problem(std::move(env), read_file(path));
}

std::string format_problem(const Problem& problem) {
  const MotionGraph& g = problem.graph();
  std::ostringstream out;
  auto cell = [&](VertexId v) {
    Cell c = g.cell(v);
    return std::to_string(c.row) + " " + std::to_string(c.col);
  };
  for (const auto& a : problem.agents)
    out << "agent " << a.id << " start " << cell(a.start) << " park " << cell(a.park) << "\n";
  for (const auto& t : problem.tasks) {
    out << "task " << t.id << " pickup " << cell(t.pickup) << " deliver " << cell(t.delivery)
        << " coalition";
    for (int a : t.coalition) out << " " << problem.agents[a].id;
    out << "\n";
  }
  for (auto [a, b] : problem.edges) out << "edge " << problem.tasks[a].id << " " << problem.tasks[b].id << "\n";
  for (int a = 0; a < problem.agent_count(); ++a) {
    out << "allot " << problem.agents[a].id;
    for (int t : problem.allotments[a]) out << " " << problem.tasks[t].id;
    out << "\n";
  }
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pcmapf
