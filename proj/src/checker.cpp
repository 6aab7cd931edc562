#include "beliefmc/checker.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <stdexcept>

namespace beliefmc {
namespace {

template <typename F>
void for_agents(uint64_t mask, F&& body) {
  while (mask) {
    int a = std::countr_zero(mask);
    mask &= mask - 1;
    body(a);
  }
}

// Defensive bounds check: a hand-built AST may reference a different model
// than the one it is evaluated against.
void check_resolved(const Model& m, const Formula& f) {
  const auto bad = [&](const std::string& what) {
    throw LookupError("formula references " + what +
                      " that this model does not declare");
  };
  for (const Formula& g : subformulas(f)) {
    switch (g.kind()) {
      case Kind::Atom: {
        if (const int* v = std::get_if<int>(&g.var())) {
          if (*v < 0 || *v >= m.variable_count()) bad("a variable");
          if (g.value() < 0 ||
              g.value() >= static_cast<int>(m.domain(*v).size()))
            bad("a variable value");
        } else {
          const FlagRef& fr = std::get<FlagRef>(g.var());
          if (fr.agent < 0 || fr.agent >= m.agent_count()) bad("an agent");
          if (fr.group < 0 || fr.group >= m.group_count()) bad("a group");
        }
        break;
      }
      case Kind::Believes:
        if (g.agent() < 0 || g.agent() >= m.agent_count()) bad("an agent");
        break;
      case Kind::Everyone:
      case Kind::Common:
      case Kind::EveryoneT:
      case Kind::CommonT:
      case Kind::EveryoneA:
      case Kind::CommonA:
      case Kind::Chi: {
        const GroupRef& gr = g.group();
        if (gr.named >= m.group_count()) bad("a group");
        if (gr.named < 0 && m.agent_count() < 64 &&
            (gr.rigid_mask >> m.agent_count()) != 0)
          bad("an agent");
        if (g.kind() == Kind::EveryoneT || g.kind() == Kind::CommonT) {
          if (g.stamp() < 0 || g.stamp() >= m.stamp_count())
            bad("a time stamp function");
        }
        break;
      }
      default:
        break;
    }
  }
}

}  // namespace

std::vector<Point> Extension::points() const {
  std::vector<Point> out;
  for (int p = 0; p < static_cast<int>(holds_.size()); ++p)
    if (holds_[p]) out.push_back(m_->point_at(p));
  return out;
}

int Extension::count() const {
  int n = 0;
  for (uint8_t b : holds_) n += b != 0;
  return n;
}

Evaluator::Evaluator(const Model& m, EvalOptions opts) : m_(m), opts_(opts) {
  if (!opts_.skip_validation_check && !m_.validated_ok())
    throw ModelError(
        "model failed validation; fix the reported violations before "
        "checking formulas");
}

bool Evaluator::check(const Formula& f, Point p) {
  int idx = m_.point_index_checked(p);
  check_resolved(m_, f);
  return ext(f)[idx] != 0;
}

Extension Evaluator::extension(const Formula& f) {
  check_resolved(m_, f);
  return Extension(f, &m_, ext(f));
}

// Points one step away from `point` under the given kind.  For the stamped
// kinds the step depends only on the run of `point`.
std::vector<int> Evaluator::step_targets(const GroupRef& g, ReachKind kind,
                                         int point) const {
  std::vector<int> out;
  const Point pt = m_.point_at(point);
  switch (kind.mode) {
    case ReachKind::Standard: {
      for_agents(g.members_at(m_, point), [&](int a) {
        for (int q : m_.successors(a, point)) out.push_back(q);
      });
      break;
    }
    case ReachKind::TimeStamped: {
      for (int a = 0; a < m_.agent_count(); ++a) {
        int t = m_.stamp_time(kind.stamp, a, pt.run);
        if (t < 0)
          throw ModelError("time stamp \"" + m_.stamp_name(kind.stamp) +
                           "\" has no time for agent " + m_.agent_name(a) +
                           " in run " + m_.run_name(pt.run));
        if (t >= m_.horizon(pt.run))
          throw ModelError("time stamp \"" + m_.stamp_name(kind.stamp) +
                           "\" is past the horizon of run " +
                           m_.run_name(pt.run));
        int q0 = m_.point_index(Point{pt.run, t});
        if (!((g.members_at(m_, q0) >> a) & 1u)) continue;
        for (int q : m_.successors(a, q0)) out.push_back(q);
      }
      break;
    }
    case ReachKind::ActionStamped: {
      const int gi = g.named;
      for (int t = 0; t < m_.horizon(pt.run); ++t) {
        int q0 = m_.point_index(Point{pt.run, t});
        uint64_t active = g.members_at(m_, q0);
        active &= gi >= 0 ? m_.acting_mask(gi, q0) : 0;
        for_agents(active, [&](int a) {
          for (int q : m_.successors(a, q0)) out.push_back(q);
        });
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Point> Evaluator::reachable_set(const GroupRef& g, Point from,
                                            ReachKind kind) {
  const int P = m_.point_count();
  std::vector<uint8_t> seen(P, 0);
  std::deque<int> work;
  for (int q : step_targets(g, kind, m_.point_index_checked(from)))
    if (!seen[q]) {
      seen[q] = 1;
      work.push_back(q);
    }
  while (!work.empty()) {
    int p = work.front();
    work.pop_front();
    for (int q : step_targets(g, kind, p))
      if (!seen[q]) {
        seen[q] = 1;
        work.push_back(q);
      }
  }
  std::vector<Point> out;
  for (int p = 0; p < P; ++p)
    if (seen[p]) out.push_back(m_.point_at(p));
  return out;
}

const std::vector<uint8_t>& Evaluator::ext(const Formula& f) {
  std::string key = struct_key(f);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  const int P = m_.point_count();
  std::vector<uint8_t> v(P, 0);

  switch (f.kind()) {
    case Kind::Atom: {
      if (const int* var = std::get_if<int>(&f.var())) {
        const int vi = *var, val = f.value();
#pragma omp parallel for if (opts_.parallel)
        for (int p = 0; p < P; ++p) v[p] = m_.raw_value(p, vi) == val;
      } else {
        const FlagRef& fr = std::get<FlagRef>(f.var());
        const bool want = f.value() == 1;
#pragma omp parallel for if (opts_.parallel)
        for (int p = 0; p < P; ++p) {
          bool bit = false;
          switch (fr.kind) {
            case FlagRef::Acting:
              bit = m_.acting(fr.group, fr.agent, p);
              break;
            case FlagRef::ShouldAct:
              bit = m_.should_act(fr.group, fr.agent, p);
              break;
            case FlagRef::Member:
              bit = m_.is_member(fr.group, p, fr.agent);
              break;
          }
          v[p] = bit == want;
        }
      }
      break;
    }
    case Kind::Not: {
      const auto& c = ext(f.child());
#pragma omp parallel for if (opts_.parallel)
      for (int p = 0; p < P; ++p) v[p] = !c[p];
      break;
    }
    case Kind::And: {
      const auto& l = ext(f.left());
      const auto& r = ext(f.right());
#pragma omp parallel for if (opts_.parallel)
      for (int p = 0; p < P; ++p) v[p] = l[p] && r[p];
      break;
    }
    case Kind::Believes: {
      const auto& c = ext(f.child());
      const int a = f.agent();
#pragma omp parallel for if (opts_.parallel)
      for (int p = 0; p < P; ++p) {
        uint8_t ok = 1;
        for (int q : m_.successors(a, p))
          if (!c[q]) {
            ok = 0;
            break;
          }
        v[p] = ok;
      }
      break;
    }
    case Kind::Everyone: {
      const auto& c = ext(f.child());
      const GroupRef g = f.group();
#pragma omp parallel for if (opts_.parallel)
      for (int p = 0; p < P; ++p) {
        uint8_t ok = 1;
        uint64_t mask = g.members_at(m_, p);
        while (mask && ok) {
          int a = std::countr_zero(mask);
          mask &= mask - 1;
          for (int q : m_.successors(a, p))
            if (!c[q]) {
              ok = 0;
              break;
            }
        }
        v[p] = ok;
      }
      break;
    }
    case Kind::Common: {
      // p fails iff some point where the operand fails is reachable from p
      // in >= 1 member step.  Backward closure from the failing points over
      // reversed step edges.
      const auto& c = ext(f.child());
      const GroupRef g = f.group();
      std::vector<std::vector<int>> rev(P);
      for (int p = 0; p < P; ++p)
        for_agents(g.members_at(m_, p), [&](int a) {
          for (int q : m_.successors(a, p)) rev[q].push_back(p);
        });
      std::vector<uint8_t> reaches_bad(P, 0);
      std::deque<int> work;
      for (int q = 0; q < P; ++q)
        if (!c[q])
          for (int p : rev[q])
            if (!reaches_bad[p]) {
              reaches_bad[p] = 1;
              work.push_back(p);
            }
      while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int p : rev[q])
          if (!reaches_bad[p]) {
            reaches_bad[p] = 1;
            work.push_back(p);
          }
      }
      for (int p = 0; p < P; ++p) v[p] = !reaches_bad[p];
      break;
    }
    case Kind::EveryoneT:
    case Kind::EveryoneA: {
      const auto& c = ext(f.child());
      const GroupRef g = f.group();
      const ReachKind kind = f.kind() == Kind::EveryoneT
                                 ? ReachKind::time_stamped(f.stamp())
                                 : ReachKind::action_stamped();
      for (int r = 0; r < m_.run_count(); ++r) {
        int p0 = m_.point_index(Point{r, 0});
        uint8_t val = 1;
        for (int q : step_targets(g, kind, p0))
          if (!c[q]) {
            val = 0;
            break;
          }
        for (int t = 0; t < m_.horizon(r); ++t)
          v[m_.point_index(Point{r, t})] = val;
      }
      break;
    }
    case Kind::CommonT:
    case Kind::CommonA: {
      // Run property.  The one-step relation out of a point depends only on
      // its run, so close over the run graph: the operator holds on run r
      // iff every step out of r and out of every run reachable from r lands
      // on a point satisfying the operand.
      const auto& c = ext(f.child());
      const GroupRef g = f.group();
      const ReachKind kind = f.kind() == Kind::CommonT
                                 ? ReachKind::time_stamped(f.stamp())
                                 : ReachKind::action_stamped();
      const int R = m_.run_count();
      std::vector<uint8_t> step_ok(R, 1);
      std::vector<std::vector<int>> run_succ(R);
      for (int r = 0; r < R; ++r) {
        std::vector<int> succ_runs;
        for (int q : step_targets(g, kind, m_.point_index(Point{r, 0}))) {
          if (!c[q]) step_ok[r] = 0;
          succ_runs.push_back(m_.run_of_point(q));
        }
        std::sort(succ_runs.begin(), succ_runs.end());
        succ_runs.erase(std::unique(succ_runs.begin(), succ_runs.end()),
                        succ_runs.end());
        run_succ[r] = std::move(succ_runs);
      }
      for (int r = 0; r < R; ++r) {
        // BFS over reachable runs, r itself included (level-1 steps).
        std::vector<uint8_t> seen(R, 0);
        std::deque<int> work{r};
        seen[r] = 1;
        uint8_t val = 1;
        while (!work.empty() && val) {
          int cur = work.front();
          work.pop_front();
          if (!step_ok[cur]) val = 0;
          for (int nxt : run_succ[cur])
            if (!seen[nxt]) {
              seen[nxt] = 1;
              work.push_back(nxt);
            }
        }
        for (int t = 0; t < m_.horizon(r); ++t)
          v[m_.point_index(Point{r, t})] = val;
      }
      break;
    }
    case Kind::Chi: {
      const GroupRef g = f.group();
      const int gi = g.named;
      for (int r = 0; r < m_.run_count(); ++r) {
        uint8_t val = 1;
        for (int t = 0; t < m_.horizon(r) && val; ++t) {
          int q = m_.point_index(Point{r, t});
          uint64_t members = g.members_at(m_, q);
          uint64_t should = gi >= 0 ? m_.should_mask(gi, q) : 0;
          uint64_t acting = gi >= 0 ? m_.acting_mask(gi, q) : 0;
          if (members & should & ~acting) val = 0;
        }
        for (int t = 0; t < m_.horizon(r); ++t)
          v[m_.point_index(Point{r, t})] = val;
      }
      break;
    }
    case Kind::Alw: {
      const auto& c = ext(f.child());
      for (int r = 0; r < m_.run_count(); ++r) {
        uint8_t val = 1;
        for (int t = 0; t < m_.horizon(r); ++t)
          if (!c[m_.point_index(Point{r, t})]) {
            val = 0;
            break;
          }
        for (int t = 0; t < m_.horizon(r); ++t)
          v[m_.point_index(Point{r, t})] = val;
      }
      break;
    }
  }

  return cache_.emplace(std::move(key), std::move(v)).first->second;
}

bool check(const Model& m, const Formula& f, Point p, EvalOptions opts) {
  Evaluator ev(m, opts);
  return ev.check(f, p);
}

Extension extension(const Model& m, const Formula& f, EvalOptions opts) {
  Evaluator ev(m, opts);
  return ev.extension(f);
}

std::vector<Point> reachable_set(const Model& m, const GroupRef& g, Point p,
                                 ReachKind kind, EvalOptions opts) {
  Evaluator ev(m, opts);
  return ev.reachable_set(g, p, kind);
}

std::vector<Point> reachable_set(const Model& m, const std::string& group,
                                 Point p, ReachKind::Mode mode,
                                 const std::string& stamp, EvalOptions opts) {
  GroupRef g;
  g.named = m.group_index(group);
  if (g.named < 0) {
    int a = m.agent_index(group);
    if (a < 0) throw LookupError("unknown group \"" + group + "\"");
    g.named = -1;
    g.rigid_mask = uint64_t{1} << a;
  }
  ReachKind kind{mode, -1};
  if (mode == ReachKind::TimeStamped) {
    kind.stamp = m.stamp_index(stamp);
    if (kind.stamp < 0)
      throw LookupError("unknown time stamp \"" + stamp + "\"");
  }
  Evaluator ev(m, opts);
  return ev.reachable_set(g, p, kind);
}

}  // namespace beliefmc
