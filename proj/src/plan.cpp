#include "pcmapf/plan.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace pcmapf {

int active_task(const Problem& problem, const AgentPath& path, Time t) {
  const auto& allot = problem.allotments[path.agent];
  for (size_t i = 0; i < path.events.size() && i < allot.size(); ++i)
    if (path.events[i].pickup <= t && t <= path.events[i].delivery) return allot[i];
  return -1;
}

bool executing_same_task(const Problem& problem, const AgentPath& a, const AgentPath& b, Time t) {
  const auto& allot = problem.allotments[a.agent];
  for (size_t i = 0; i < a.events.size() && i < allot.size(); ++i) {
    if (a.events[i].pickup > t || t > a.events[i].delivery) continue;
    int k = problem.allotment_index(b.agent, allot[i]);
    if (k < 0 || k >= static_cast<int>(b.events.size())) continue;
    if (b.events[k].pickup <= t && t <= b.events[k].delivery) return true;
  }
  return false;
}

Time Solution::makespan() const {
  Time m = 0;
  for (const auto& p : paths) m = std::max(m, p.arrival());
  return m;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Timeout: return "timeout";
    case SolveStatus::Exhausted: return "exhausted";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

std::string format_solution(const Problem& problem, const Solution& solution,
                            const SolveStats* stats, std::string_view algorithm) {
  const MotionGraph& g = problem.graph();
  std::ostringstream out;
  out << "makespan " << solution.makespan() << "\n";
  for (const auto& p : solution.paths) {
    out << "path " << problem.agents[p.agent].id;
    for (size_t t = 0; t < p.positions.size(); ++t) {
      Cell c = g.cell(p.positions[t]);
      out << " (" << c.row << "," << c.col << ")@" << t;
    }
    out << "\n";
  }
  for (int t = 0; t < problem.task_count(); ++t) {
    int first = problem.tasks[t].coalition.front();
    int k = problem.allotment_index(first, t);
    const auto& events = solution.paths[first].events;
    if (k < 0 || k >= static_cast<int>(events.size())) continue;
    out << "event " << problem.tasks[t].id << " pickup " << events[k].pickup << " deliver "
        << events[k].delivery << "\n";
  }
  if (stats) {
    out << "ct_nodes " << stats->ct_nodes << "\n";
    out << "ll_expansions " << stats->ll_expansions << "\n";
    out << "runtime_ms " << stats->runtime_ms << "\n";
  }
  if (!algorithm.empty()) out << "algorithm " << algorithm << "\n";
  return out.str();
}

namespace {

int to_int(std::string_view tok, int line_no) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line_no, "expected integer, got '" + std::string(tok) + "'");
  return value;
}

}  // namespace

Solution parse_solution(const Problem& problem, std::string_view text) {
  const MotionGraph& g = problem.graph();
  std::map<int, int> agent_index, task_index;
  for (int a = 0; a < problem.agent_count(); ++a) agent_index[problem.agents[a].id] = a;
  for (int t = 0; t < problem.task_count(); ++t) task_index[problem.tasks[t].id] = t;

  Solution sol;
  sol.paths.resize(problem.agent_count());
  std::vector<bool> have_path(problem.agent_count(), false);
  std::vector<std::optional<TaskEvent>> task_events(problem.task_count());

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string s; ls >> s;) tok.push_back(s);
    if (tok.empty()) continue;
    const std::string& kind = tok[0];
    if (kind == "makespan" || kind == "ct_nodes" || kind == "ll_expansions" ||
        kind == "runtime_ms" || kind == "algorithm") {
      continue;
    } else if (kind == "path") {
      if (tok.size() < 2) throw ParseError(line_no, "path record without agent");
      auto it = agent_index.find(to_int(tok[1], line_no));
      if (it == agent_index.end()) throw ParseError(line_no, "unknown agent " + tok[1]);
      AgentPath& p = sol.paths[it->second];
      if (have_path[it->second]) throw ParseError(line_no, "duplicate path for agent " + tok[1]);
      have_path[it->second] = true;
      p.agent = it->second;
      for (size_t i = 2; i < tok.size(); ++i) {
        // (r,c)@t
        const std::string& s = tok[i];
        auto comma = s.find(',');
        auto close = s.find(")@");
        if (s.empty() || s[0] != '(' || comma == std::string::npos || close == std::string::npos)
          throw ParseError(line_no, "malformed position '" + s + "'");
        int r = to_int(std::string_view(s).substr(1, comma - 1), line_no);
        int c = to_int(std::string_view(s).substr(comma + 1, close - comma - 1), line_no);
        int t = to_int(std::string_view(s).substr(close + 2), line_no);
        if (t != static_cast<int>(p.positions.size()))
          throw ParseError(line_no, "positions must be listed for consecutive timesteps from 0");
        VertexId v = g.vertex_at({r, c});
        if (v == kNoVertex) throw ParseError(line_no, "position " + s + " is not a free cell");
        p.positions.push_back(v);
      }
      if (p.positions.empty()) throw ParseError(line_no, "empty path");
    } else if (kind == "event") {
      if (tok.size() != 6 || tok[2] != "pickup" || tok[4] != "deliver")
        throw ParseError(line_no, "expected 'event <task> pickup <t> deliver <t>'");
      auto it = task_index.find(to_int(tok[1], line_no));
      if (it == task_index.end()) throw ParseError(line_no, "unknown task " + tok[1]);
      task_events[it->second] = TaskEvent{to_int(tok[3], line_no), to_int(tok[5], line_no)};
    } else {
      throw ParseError(line_no, "unknown record '" + kind + "'");
    }
  }
  for (int a = 0; a < problem.agent_count(); ++a) {
    if (!have_path[a])
      throw ParseError(line_no, "missing path for agent " + std::to_string(problem.agents[a].id));
    for (int t : problem.allotments[a]) {
      if (!task_events[t])
        throw ParseError(line_no, "missing event for task " + std::to_string(problem.tasks[t].id));
      sol.paths[a].events.push_back(*task_events[t]);
    }
  }
  return sol;
}

}  // namespace pcmapf
