#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "corruptions.hpp"
#include "pcmapf/pccbs.hpp"
#include "pcmapf/verify.hpp"
#include "support.hpp"

using namespace pcmapf;
using fixtures::empty9;

namespace {

// Same instance with rows and columns exchanged.
Problem transpose(const Problem& p) {
  const GridMap& m = p.graph().map();
  std::vector<uint8_t> blocked(static_cast<size_t>(m.width()) * m.height());
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) blocked[c * m.height() + r] = m.is_free({r, c}) ? 0 : 1;
  auto env = std::make_shared<const Environment>(GridMap(m.height(), m.width(), blocked));
  std::string text = format_problem(p);
  // Every coordinate pair in the problem text follows a keyword.
  std::istringstream in(text);
  std::ostringstream out;
  for (std::string line; std::getline(in, line);) {
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string x; words >> x;) w.push_back(x);
    for (size_t i = 0; i + 2 < w.size(); ++i)
      if (w[i] == "start" || w[i] == "park" || w[i] == "pickup" || w[i] == "deliver") std::swap(w[i + 1], w[i + 2]);
    for (size_t i = 0; i < w.size(); ++i) out << (i ? " " : "") << w[i];
    out << "\n";
  }
  return parse_problem(env, out.str());
}

// Agents listed in reverse order under the same external ids.
Problem reverse_agents(const Problem& p) {
  std::istringstream in(format_problem(p));
  std::vector<std::string> agents, rest;
  for (std::string line; std::getline(in, line);) (line.rfind("agent", 0) == 0 ? agents : rest).push_back(line);
  std::reverse(agents.begin(), agents.end());
  std::string text;
  for (const auto& l : agents) text += l + "\n";
  for (const auto& l : rest) text += l + "\n";
  return parse_problem(p.env, text);
}

}  // namespace

TEST(Validator, HandWrittenBasesAreValid) {
  auto domains = fixtures::corruption_domains();
  for (const auto& d : domains) {
    ValidationReport r = validate_solution(d.problem, d.valid);
    EXPECT_TRUE(r.ok) << d.name << "\n" << r.summary();
  }
}

TEST(Validator, RejectsEachCorruptionWithItsKind) {
  auto domains = fixtures::corruption_domains();
  auto catalogue = fixtures::corruption_catalogue(domains);
  ASSERT_EQ(catalogue.size(), 20u);
  for (const auto& c : catalogue) {
    ValidationReport r = validate_solution(c.domain->problem, c.solution);
    EXPECT_FALSE(r.ok) << c.name;
    EXPECT_TRUE(r.has(c.expected)) << c.name << " expected " << to_string(c.expected) << "\n" << r.summary();
    if (c.expected_time >= 0) {
      bool at_time = std::any_of(r.violations.begin(), r.violations.end(),
                                 [&](const Violation& v) { return v.kind == c.expected && v.time == c.expected_time; });
      EXPECT_TRUE(at_time) << c.name << "\n" << r.summary();
    }
  }
}

TEST(Validator, CoversEveryKind) {
  auto domains = fixtures::corruption_domains();
  std::vector<bool> seen(7, false);
  for (const auto& c : fixtures::corruption_catalogue(domains)) seen[static_cast<int>(c.expected)] = true;
  EXPECT_EQ(std::count(seen.begin(), seen.end(), true), 7);
}

TEST(Validator, WrongPathCount) {
  auto domains = fixtures::corruption_domains();
  Solution s = domains[0].valid;
  s.paths.pop_back();
  ValidationReport r = validate_solution(domains[0].problem, s);
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(r.has(ViolationKind::Discontinuity));
}

TEST(Validator, SummaryNamesKindAndTime) {
  auto domains = fixtures::corruption_domains();
  auto catalogue = fixtures::corruption_catalogue(domains);
  auto swap = std::find_if(catalogue.begin(), catalogue.end(), [](const auto& c) { return c.name == "crossing/swap-at-two"; });
  ASSERT_NE(swap, catalogue.end());
  EXPECT_EQ(validate_solution(swap->domain->problem, swap->solution).summary().rfind("edge-collision t=2: ", 0), 0u);
}

TEST(Oracle, CornerToCorner) {
  auto env = fixtures::make_env("height 3\nwidth 3\n...\n...\n...\n");
  Problem p = parse_problem(env, "agent 1 start 0 0 park 2 2\ntask 1 pickup 0 0 deliver 2 2 coalition 1\nallot 1 1\n");
  OracleResult r = oracle_makespan(p);
  ASSERT_EQ(r.status, OracleStatus::Solved);
  EXPECT_EQ(r.makespan, 4);
}

TEST(Oracle, HeadOnCorridorOneYields) {
  auto env = fixtures::make_env("height 2\nwidth 5\n.....\n@@.@@\n");
  Problem p = parse_problem(env, "agent 1 start 0 0 park 0 4\nagent 2 start 0 4 park 0 0\nallot 1\nallot 2\n");
  OracleResult r = oracle_makespan(p, kDefaultOracleBudget, true);
  ASSERT_EQ(r.status, OracleStatus::Solved);
  // One agent ducks into the pocket and lets the other pass.
  EXPECT_GT(r.makespan, 4);
  SolveResult pc = solve_pccbs(p);
  ASSERT_EQ(pc.status, SolveStatus::Solved);
  EXPECT_EQ(pc.solution->makespan(), r.makespan);
  ASSERT_TRUE(r.solution);
  EXPECT_TRUE(validate_solution(p, *r.solution).ok);
}

TEST(Oracle, RelayCarryTwoStartsNoEarlierThanFour) {
  Problem p = fixtures::relay_problem();
  OracleResult r = oracle_makespan(p, kDefaultOracleBudget, true);
  ASSERT_EQ(r.status, OracleStatus::Solved);
  EXPECT_EQ(r.makespan, 7);
  ASSERT_TRUE(r.solution);
  EXPECT_GE(r.solution->paths[1].events[0].pickup, 4);
  EXPECT_TRUE(validate_solution(p, *r.solution).ok);
}

TEST(Oracle, InfeasibleAndBudget) {
  auto env = fixtures::make_env("height 1\nwidth 3\n.@.\n");
  Problem cut = parse_problem(env, "agent 1 start 0 0 park 0 2\nallot 1\n");
  EXPECT_EQ(oracle_makespan(cut).status, OracleStatus::Infeasible);
  Problem p = fixtures::corridor_problem();
  EXPECT_EQ(oracle_makespan(p, 5).status, OracleStatus::BudgetExceeded);
}

TEST(Oracle, SolutionsValidateOnRandomInstances) {
  for (int i = 0; i < 30; ++i) {
    Problem p = fixtures::random_small_instance(50000 + i);
    OracleResult r = oracle_makespan(p, kDefaultOracleBudget, true);
    ASSERT_EQ(r.status, OracleStatus::Solved) << i;
    ASSERT_TRUE(r.solution);
    EXPECT_EQ(r.solution->makespan(), r.makespan) << i;
    ValidationReport rep = validate_solution(p, *r.solution);
    EXPECT_TRUE(rep.ok) << i << "\n" << rep.summary();
  }
}

TEST(Oracle, InvariantUnderRelabelingAndTransposition) {
  for (int i = 0; i < 20; ++i) {
    Problem p = fixtures::random_small_instance(60000 + i);
    Time base = oracle_makespan(p).makespan;
    EXPECT_EQ(oracle_makespan(reverse_agents(p)).makespan, base) << i;
    EXPECT_EQ(oracle_makespan(transpose(p)).makespan, base) << i;
  }
}
