#pragma once

// Hand-written valid plans for four small domains and twenty single-fault
// variants of them, each tagged with the violation it must trigger.

#include <functional>
#include <string>
#include <vector>

#include "pcmapf/verify.hpp"
#include "support.hpp"

namespace pcmapf::fixtures {

struct Domain {
  std::string name;
  Problem problem;
  Solution valid;
};

struct Corruption {
  std::string name;
  const Domain* domain;
  Solution solution;
  ViolationKind expected;
  Time expected_time = -1;  // checked when >= 0
};

inline std::vector<VertexId> cells(const Problem& p, std::initializer_list<Cell> list) {
  std::vector<VertexId> out;
  for (Cell c : list) out.push_back(p.graph().vertex_at(c));
  return out;
}

inline std::vector<Domain> corruption_domains() {
  std::vector<Domain> out;
  {
    Problem p = relay_problem();
    Solution s;
    s.paths.push_back({0, cells(p, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}}), {{2, 4}}});
    s.paths.push_back({1, cells(p, {{4, 0}, {4, 1}, {4, 2}, {4, 2}, {4, 2}, {4, 3}, {4, 4}, {4, 5}}), {{4, 7}}});
    out.push_back({"assembly", p, s});
  }
  {
    Problem p = parse_problem(empty9(),
                              "agent 1 start 0 0 park 3 6\n"
                              "agent 2 start 2 0 park 4 6\n"
                              "task 1 pickup 1 1 deliver 3 5 coalition 1 2\n"
                              "allot 1 1\nallot 2 1\n");
    Solution s;
    auto carry = cells(p, {{2, 1}, {3, 1}, {3, 2}, {3, 3}, {3, 4}, {3, 5}});
    auto a = cells(p, {{0, 0}, {0, 1}, {1, 1}});
    auto b = cells(p, {{2, 0}, {2, 1}, {1, 1}});
    a.insert(a.end(), carry.begin(), carry.end());
    b.insert(b.end(), carry.begin(), carry.end());
    a.push_back(p.graph().vertex_at({3, 6}));
    b.push_back(p.graph().vertex_at({4, 5}));
    b.push_back(p.graph().vertex_at({4, 6}));
    s.paths.push_back({0, a, {{2, 8}}});
    s.paths.push_back({1, b, {{2, 8}}});
    out.push_back({"cmapd", p, s});
  }
  {
    Problem p = corridor_problem();
    Solution s;
    s.paths.push_back({0, cells(p, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 2}, {5, 2}}), {{2, 7}}});
    s.paths.push_back({1, cells(p, {{1, 2}, {1, 2}, {1, 2}, {0, 2}, {1, 2}, {2, 2}, {3, 2}, {4, 2}}), {{5, 7}}});
    out.push_back({"corridor", p, s});
  }
  {
    Problem p = parse_problem(empty9(),
                              "agent 1 start 0 0 park 0 5\n"
                              "agent 2 start 0 5 park 0 0\n"
                              "allot 1\nallot 2\n");
    Solution s;
    s.paths.push_back({0, cells(p, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}), {}});
    s.paths.push_back({1, cells(p, {{0, 5}, {1, 5}, {1, 4}, {1, 3}, {1, 2}, {1, 1}, {1, 0}, {0, 0}}), {}});
    out.push_back({"crossing", p, s});
  }
  return out;
}

// `domains` must outlive the returned corruptions.
inline std::vector<Corruption> corruption_catalogue(const std::vector<Domain>& domains) {
  std::vector<Corruption> out;
  auto add = [&](const Domain& d, std::string name, ViolationKind kind, std::function<void(Solution&)> edit,
                 Time at = -1) {
    Solution s = d.valid;
    edit(s);
    out.push_back({d.name + "/" + name, &d, std::move(s), kind, at});
  };
  const Domain& asm_ = domains[0];
  const Domain& co = domains[1];
  const Domain& cor = domains[2];
  const Domain& cross = domains[3];
  auto v = [](const Domain& d, int r, int c) { return d.problem.graph().vertex_at({r, c}); };

  add(asm_, "early-successor-pickup", ViolationKind::Precedence, [&](Solution& s) {
    s.paths[1].positions = cells(asm_.problem, {{4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4}, {4, 5}});
    s.paths[1].events = {{2, 5}};
  }, 2);
  add(asm_, "skipped-cell", ViolationKind::Discontinuity, [&](Solution& s) {
    s.paths[0].positions.erase(s.paths[0].positions.begin() + 1);
    s.paths[0].events = {{1, 3}};
  });
  add(asm_, "wanders-off-after-parking", ViolationKind::Parking,
      [&](Solution& s) { s.paths[0].positions.push_back(v(asm_, 1, 4)); });
  add(asm_, "pickup-time-off-vertex", ViolationKind::Interval, [&](Solution& s) { s.paths[0].events[0].pickup = 1; }, 1);
  add(asm_, "missing-events", ViolationKind::Interval, [&](Solution& s) { s.paths[1].events.clear(); });
  add(asm_, "delivery-before-pickup", ViolationKind::Interval,
      [&](Solution& s) { s.paths[1].events[0] = {7, 4}; });
  add(asm_, "walks-into-waiting-agent", ViolationKind::VertexCollision, [&](Solution& s) {
    s.paths[0].positions.insert(s.paths[0].positions.begin() + 1, 4, v(asm_, 0, 0));
    s.paths[0].events = {{6, 8}};
    s.paths[1].positions = cells(asm_.problem, {{4, 0}, {3, 0}, {2, 0}, {1, 0}, {0, 0}, {1, 0}, {2, 0}, {3, 0},
                                                {4, 0}, {4, 1}, {4, 2}, {4, 3}, {4, 4}, {4, 5}});
    s.paths[1].events = {{10, 13}};
  }, 4);
  add(asm_, "wrong-start", ViolationKind::Discontinuity,
      [&](Solution& s) { s.paths[1].positions[0] = v(asm_, 5, 0); }, 0);

  add(co, "pickups-at-different-times", ViolationKind::CoalitionDesync, [&](Solution& s) {
    s.paths[0].positions = cells(co.problem, {{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 1}, {1, 1}, {2, 1}, {3, 1}, {3, 2},
                                              {3, 3}, {3, 4}, {3, 5}, {3, 6}});
    s.paths[0].events = {{5, 11}};
    s.paths[1].positions = cells(co.problem, {{2, 0}, {2, 0}, {2, 0}, {2, 0}, {2, 0}, {2, 0}, {1, 0}, {1, 1}, {1, 2},
                                              {1, 3}, {1, 4}, {1, 5}, {2, 5}, {3, 5}, {4, 5}, {4, 6}});
    s.paths[1].events = {{7, 13}};
  }, 5);
  add(co, "members-apart-mid-carry", ViolationKind::CoalitionDesync, [&](Solution& s) {
    s.paths[1].positions = cells(co.problem, {{2, 0}, {2, 1}, {1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 4}, {3, 5},
                                              {4, 5}, {4, 6}});
  }, 3);
  add(co, "waiting-together-before-pickup", ViolationKind::VertexCollision, [&](Solution& s) {
    for (auto& path : s.paths) {
      path.positions.insert(path.positions.begin() + 2, path.positions[2]);
      path.events = {{3, 9}};
    }
  }, 2);
  add(co, "stops-short", ViolationKind::Parking, [&](Solution& s) { s.paths[1].positions.pop_back(); });
  add(co, "delivery-time-off-vertex", ViolationKind::Interval, [&](Solution& s) {
    for (auto& path : s.paths) path.events[0].delivery = 7;
  }, 7);

  add(cross, "swap-at-two", ViolationKind::EdgeCollision, [&](Solution& s) {
    s.paths[0].positions = cells(cross.problem, {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 3}, {1, 4}, {0, 4}, {0, 5}});
    s.paths[1].positions = cells(cross.problem, {{0, 5}, {0, 4}, {0, 3}, {0, 2}, {0, 1}, {1, 1}, {1, 0}, {0, 0}});
  }, 2);

  add(cor, "delivers-and-blocks", ViolationKind::VertexCollision, [&](Solution& s) {
    s.paths[1].positions = cells(cor.problem, {{1, 2}, {2, 2}, {3, 2}, {4, 2}});
    s.paths[1].events = {{1, 3}};
  }, 6);
  add(cor, "swap-in-the-bay", ViolationKind::EdgeCollision, [&](Solution& s) {
    s.paths[1].positions = cells(cor.problem, {{1, 2}, {1, 2}, {1, 2}, {1, 1}, {1, 2}, {2, 2}, {3, 2}, {4, 2}});
  }, 2);
  add(cor, "ends-early", ViolationKind::Parking, [&](Solution& s) {
    s.paths[0].positions.pop_back();
    s.paths[0].events = {{2, 6}};
  });
  add(cor, "diagonal-step", ViolationKind::Discontinuity,
      [&](Solution& s) { s.paths[0].positions[1] = v(cor, 1, 1); });
  add(cor, "late-delivery-record", ViolationKind::Interval, [&](Solution& s) { s.paths[1].events[0].delivery = 6; }, 6);
  add(cor, "teleport", ViolationKind::Discontinuity, [&](Solution& s) { s.paths[0].positions[4] = v(cor, 0, 4); });
  return out;
}

}  // namespace pcmapf::fixtures
