#include "beliefmc/reference.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace beliefmc {
namespace {

// Iterate the set bits of an agent mask.
template <typename F>
bool all_agents(uint64_t mask, F&& body) {
  while (mask) {
    int a = std::countr_zero(mask);
    mask &= mask - 1;
    if (!body(a)) return false;
  }
  return true;
}

}  // namespace

RefEvaluator::RefEvaluator(const Model& m, int nesting_k)
    : m_(m), k_(nesting_k < 0 ? m.point_count() : nesting_k) {}

bool RefEvaluator::holds(const Formula& f, Point p) {
  if (!f.valid()) throw std::invalid_argument("empty formula");
  roots_.push_back(f);  // pin node addresses for the memo's lifetime
  return eval(f, m_.point_index_checked(p));
}

const std::vector<Formula>& RefEvaluator::chain(const Formula& c) {
  auto it = chains_.find(c.node());
  if (it != chains_.end()) return it->second;
  std::vector<Formula> links;
  links.reserve(k_);
  Formula cur = c.child();
  for (int i = 0; i < k_; ++i) {
    switch (c.kind()) {
      case Kind::Common:
        cur = Formula::everyone(c.group(), cur);
        break;
      case Kind::CommonT:
        cur = Formula::everyone_t(c.group(), c.stamp(), cur);
        break;
      case Kind::CommonA:
        cur = Formula::everyone_a(c.group(), cur);
        break;
      default:
        throw std::invalid_argument("chain of a non-common operator");
    }
    links.push_back(cur);
  }
  return chains_.emplace(c.node(), std::move(links)).first->second;
}

bool RefEvaluator::eval(const Formula& f, int p) {
  auto& slot = memo_[f.node()];
  if (slot.empty()) slot.assign(m_.point_count(), -1);
  if (slot[p] >= 0) return slot[p] != 0;

  const Point pt = m_.point_at(p);
  const int run = pt.run;
  bool result = true;

  switch (f.kind()) {
    case Kind::Atom: {
      if (const int* v = std::get_if<int>(&f.var())) {
        result = m_.raw_value(p, *v) == f.value();
      } else {
        const FlagRef& fr = std::get<FlagRef>(f.var());
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
        result = bit == (f.value() == 1);
      }
      break;
    }
    case Kind::Not:
      result = !eval(f.child(), p);
      break;
    case Kind::And:
      result = eval(f.left(), p) && eval(f.right(), p);
      break;
    case Kind::Believes: {
      for (int q : m_.successors(f.agent(), p))
        if (!eval(f.child(), q)) {
          result = false;
          break;
        }
      break;
    }
    case Kind::Everyone: {
      result = all_agents(f.group().members_at(m_, p), [&](int a) {
        for (int q : m_.successors(a, p))
          if (!eval(f.child(), q)) return false;
        return true;
      });
      break;
    }
    case Kind::EveryoneT: {
      // Run property: every agent with a defined meeting time who is a
      // member at their own stamped point must believe the operand there.
      for (int a = 0; a < m_.agent_count() && result; ++a) {
        int t = m_.stamp_time(f.stamp(), a, run);
        if (t < 0)
          throw ModelError("time stamp \"" + m_.stamp_name(f.stamp()) +
                           "\" has no time for agent " + m_.agent_name(a) +
                           " in run " + m_.run_name(run));
        if (t >= m_.horizon(run))
          throw ModelError("time stamp \"" + m_.stamp_name(f.stamp()) +
                           "\" is past the horizon of run " +
                           m_.run_name(run));
        int q = m_.point_index(Point{run, t});
        if (!((f.group().members_at(m_, q) >> a) & 1u)) continue;
        for (int q2 : m_.successors(a, q))
          if (!eval(f.child(), q2)) {
            result = false;
            break;
          }
      }
      break;
    }
    case Kind::EveryoneA: {
      // Run property: at every point of the run, each member currently
      // carrying out their part must believe the operand.
      const int g = f.group().named;
      for (int t = 0; t < m_.horizon(run) && result; ++t) {
        int q = m_.point_index(Point{run, t});
        uint64_t active = f.group().members_at(m_, q);
        active &= g >= 0 ? m_.acting_mask(g, q) : 0;
        result = all_agents(active, [&](int a) {
          for (int q2 : m_.successors(a, q))
            if (!eval(f.child(), q2)) return false;
          return true;
        });
      }
      break;
    }
    case Kind::Common:
    case Kind::CommonT:
    case Kind::CommonA: {
      for (const Formula& link : chain(f))
        if (!eval(link, p)) {
          result = false;
          break;
        }
      break;
    }
    case Kind::Chi: {
      // Run property: no member of the group misses an obligation anywhere
      // in the run.
      const int g = f.group().named;
      for (int t = 0; t < m_.horizon(run); ++t) {
        int q = m_.point_index(Point{run, t});
        uint64_t members = f.group().members_at(m_, q);
        uint64_t should = g >= 0 ? m_.should_mask(g, q) : 0;
        uint64_t acting = g >= 0 ? m_.acting_mask(g, q) : 0;
        if (members & should & ~acting) {
          result = false;
          break;
        }
      }
      break;
    }
    case Kind::Alw: {
      for (int t = 0; t < m_.horizon(run); ++t)
        if (!eval(f.child(), m_.point_index(Point{run, t}))) {
          result = false;
          break;
        }
      break;
    }
  }

  // The recursive calls above may rehash memo_, so re-fetch the slot.
  memo_[f.node()][p] = result ? 1 : 0;
  return result;
}

bool bounded_nesting_oracle(const Model& m, const Formula& c, Point p,
                            int k) {
  if (!c.valid()) throw std::invalid_argument("empty formula");
  switch (c.kind()) {
    case Kind::Common:
    case Kind::CommonT:
    case Kind::CommonA:
      break;
    default:
      throw std::invalid_argument(
          "bounded_nesting_oracle expects a common-belief formula");
  }
  if (k < 0) throw std::invalid_argument("negative nesting depth");
  RefEvaluator ev(m, k);
  return ev.holds(c, p);
}

}  // namespace beliefmc
