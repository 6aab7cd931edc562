#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "beliefmc/checker.hpp"
#include "beliefmc/model.hpp"

// Independent oracles for the test suite: everything here is written as
// plain nested scans over the model accessors, sharing no logic with the
// library's validator or evaluators.
namespace testsup {

using beliefmc::GroupRef;
using beliefmc::Model;
using beliefmc::ModelBuilder;
using beliefmc::Point;
using beliefmc::ReachKind;

// One agent's belief edges as explicit (from, to) point-index pairs.
using EdgeSet = std::set<std::pair<int, int>>;

inline std::vector<EdgeSet> edges_of(const Model& m) {
  std::vector<EdgeSet> es(m.agent_count());
  for (int a = 0; a < m.agent_count(); ++a)
    for (int p = 0; p < m.point_count(); ++p)
      for (int q : m.successors(a, p)) es[a].insert({p, q});
  return es;
}

inline bool serial_ok(const EdgeSet& e, int npoints) {
  std::vector<char> has(npoints, 0);
  for (const auto& [p, q] : e) has[p] = 1;
  for (int p = 0; p < npoints; ++p)
    if (!has[p]) return false;
  return true;
}

inline bool transitive_ok(const EdgeSet& e) {
  for (const auto& [p, q] : e)
    for (const auto& [q2, s] : e)
      if (q2 == q && !e.count({p, s})) return false;
  return true;
}

inline bool euclidean_ok(const EdgeSet& e) {
  for (const auto& [p, q] : e)
    for (const auto& [p2, s] : e)
      if (p2 == p && !e.count({q, s})) return false;
  return true;
}

// Smallest serial, transitive and Euclidean superset of the given edges:
// alternate the two closure rules until stable, then give any point still
// without successors a loop onto itself.
inline EdgeSet kd45_closure(EdgeSet e, int npoints) {
  bool changed = true;
  while (changed) {
    changed = false;
    EdgeSet add;
    for (const auto& [p, q] : e)
      for (const auto& [q2, s] : e)
        if (q2 == q && !e.count({p, s})) add.insert({p, s});
    for (const auto& [p, q] : e)
      for (const auto& [p2, s] : e)
        if (p2 == p && !e.count({q, s})) add.insert({q, s});
    if (!add.empty()) {
      changed = true;
      e.insert(add.begin(), add.end());
    }
  }
  std::vector<char> has(npoints, 0);
  for (const auto& [p, q] : e) has[p] = 1;
  for (int p = 0; p < npoints; ++p)
    if (!has[p]) e.insert({p, p});
  return e;
}

// Clone of m with every agent's belief edges replaced.
inline Model rebuild_with_edges(const Model& m, const std::vector<EdgeSet>& es) {
  ModelBuilder b;
  for (int a = 0; a < m.agent_count(); ++a) b.agent(m.agent_name(a));
  for (int v = 0; v < m.variable_count(); ++v)
    b.variable(m.variable_name(v), m.domain(v));
  for (int r = 0; r < m.run_count(); ++r) b.run(m.run_name(r), m.horizon(r));
  for (int p = 0; p < m.point_count(); ++p) {
    Point pt = m.point_at(p);
    for (int v = 0; v < m.variable_count(); ++v) {
      int raw = m.raw_value(p, v);
      if (raw >= 0)
        b.value(m.run_name(pt.run), pt.time, m.variable_name(v),
                m.domain(v)[raw]);
    }
  }
  for (int a = 0; a < m.agent_count(); ++a)
    for (const auto& [p, q] : es[a]) {
      Point from = m.point_at(p), to = m.point_at(q);
      b.belief(m.agent_name(a), m.run_name(from.run), from.time,
               m.run_name(to.run), to.time);
    }
  for (int g = 0; g < m.group_count(); ++g) {
    if (m.group_is_rigid(g)) {
      std::vector<std::string> members;
      uint64_t mask = m.membership_mask(g, 0);
      for (int a = 0; a < m.agent_count(); ++a)
        if ((mask >> a) & 1u) members.push_back(m.agent_name(a));
      b.rigid_group(m.group_name(g), members);
    } else {
      b.group(m.group_name(g));
      for (int p = 0; p < m.point_count(); ++p) {
        Point pt = m.point_at(p);
        for (int a = 0; a < m.agent_count(); ++a)
          if (m.is_member(g, p, a))
            b.member(m.group_name(g), m.run_name(pt.run), pt.time,
                     m.agent_name(a));
      }
    }
  }
  for (int s = 0; s < m.stamp_count(); ++s) {
    b.stamp(m.stamp_name(s));
    for (int a = 0; a < m.agent_count(); ++a)
      for (int r = 0; r < m.run_count(); ++r) {
        int t = m.stamp_time(s, a, r);
        if (t >= 0)
          b.stamp_time(m.stamp_name(s), m.agent_name(a), m.run_name(r), t);
      }
  }
  for (int g = 0; g < m.group_count(); ++g)
    for (int p = 0; p < m.point_count(); ++p) {
      Point pt = m.point_at(p);
      for (int a = 0; a < m.agent_count(); ++a) {
        if (m.acting(g, a, p))
          b.acting(m.group_name(g), m.agent_name(a), m.run_name(pt.run),
                   pt.time);
        if (m.should_act(g, a, p))
          b.should(m.group_name(g), m.agent_name(a), m.run_name(pt.run),
                   pt.time);
      }
    }
  return b.build();
}

// One step of the given kind, read directly off the model.
inline std::vector<int> naive_step(const Model& m, const GroupRef& g,
                                   ReachKind kind, int p) {
  std::set<int> out;
  Point pt = m.point_at(p);
  if (kind.mode == ReachKind::Standard) {
    for (int a = 0; a < m.agent_count(); ++a)
      if ((g.members_at(m, p) >> a) & 1u)
        for (int q : m.successors(a, p)) out.insert(q);
  } else if (kind.mode == ReachKind::TimeStamped) {
    for (int a = 0; a < m.agent_count(); ++a) {
      int t = m.stamp_time(kind.stamp, a, pt.run);  // validated: in range
      int q = m.point_index(Point{pt.run, t});
      if ((g.members_at(m, q) >> a) & 1u)
        for (int q2 : m.successors(a, q)) out.insert(q2);
    }
  } else {
    for (int t = 0; t < m.horizon(pt.run); ++t) {
      int q = m.point_index(Point{pt.run, t});
      for (int a = 0; a < m.agent_count(); ++a) {
        bool member = (g.members_at(m, q) >> a) & 1u;
        bool act = g.named >= 0 && m.acting(g.named, a, q);
        if (member && act)
          for (int q2 : m.successors(a, q)) out.insert(q2);
      }
    }
  }
  return {out.begin(), out.end()};
}

// Points reachable in one or more steps, by breadth-first closure.
inline std::vector<Point> naive_reachable(const Model& m, const GroupRef& g,
                                          Point from, ReachKind kind) {
  std::set<int> seen;
  std::vector<int> frontier = naive_step(m, g, kind, m.point_index_checked(from));
  for (int q : frontier) seen.insert(q);
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int q : frontier)
      for (int q2 : naive_step(m, g, kind, q))
        if (seen.insert(q2).second) next.push_back(q2);
    frontier = std::move(next);
  }
  std::vector<Point> out;
  out.reserve(seen.size());
  for (int q : seen) out.push_back(m.point_at(q));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testsup
