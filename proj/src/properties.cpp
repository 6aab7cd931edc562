#include "beliefmc/properties.hpp"

#include <algorithm>

namespace beliefmc {
namespace {

GroupRef named_group(const Model& m, int group) {
  if (group < 0 || group >= m.group_count())
    throw LookupError("unknown group index " + std::to_string(group));
  GroupRef g;
  g.named = group;
  return g;
}

std::string side_note(bool left, bool right) {
  if (left && right) return "both sides hold";
  if (!left && !right) return "both sides fail";
  return std::string("left ") + (left ? "holds" : "fails") + ", right " +
         (right ? "holds" : "fails");
}

}  // namespace

int resolve_group(const Model& m, const std::string& name) {
  int g = m.group_index(name);
  if (g < 0) throw LookupError("unknown group \"" + name + "\"");
  return g;
}

Extension chi_extension(const Model& m, int group, EvalOptions opts) {
  Evaluator ev(m, opts);
  return ev.extension(Formula::chi(named_group(m, group)));
}

JbReport check_jb(const Model& m, int group, EvalOptions opts) {
  GroupRef g = named_group(m, group);
  Evaluator ev(m, opts);
  const Formula chi = Formula::chi(g);

  // One believes-extension per agent; reused across all of that agent's
  // acting points.
  std::vector<Extension> believes_chi;
  believes_chi.reserve(m.agent_count());
  for (int a = 0; a < m.agent_count(); ++a)
    believes_chi.push_back(ev.extension(Formula::believes(a, chi)));

  JbReport report;
  for (int p = 0; p < m.point_count(); ++p) {
    uint64_t active = m.membership_mask(group, p) & m.acting_mask(group, p);
    for (int a = 0; a < m.agent_count(); ++a) {
      if (!((active >> a) & 1u)) continue;
      if (!believes_chi[a].holds(p))
        report.violations.emplace_back(m.point_at(p), a);
    }
  }
  report.holds = report.violations.empty();
  return report;
}

TheoremReport verify_theorem_1_2(const Model& m, int group,
                                 EvalOptions opts) {
  GroupRef g = named_group(m, group);
  TheoremReport rep;
  rep.theorem = 12;

  JbReport jb = check_jb(m, group, opts);
  rep.left = jb.holds;

  Evaluator ev(m, opts);
  Extension ca = ev.extension(Formula::common_a(g, Formula::chi(g)));
  rep.right = ca.count() == m.point_count();

  rep.equivalence_respected = rep.left == rep.right;
  if (rep.equivalence_respected) {
    rep.message = "joint behavior and everywhere action-stamped common "
                  "belief of the group plan agree (" +
                  side_note(rep.left, rep.right) + ")";
  } else {
    if (!rep.right) {
      for (int p = 0; p < m.point_count(); ++p)
        if (!ca.holds(p)) {
          rep.witness = m.point_at(p);
          break;
        }
    } else if (!jb.violations.empty()) {
      rep.witness = jb.violations.front().first;
    }
    rep.message = "equivalence violated (" + side_note(rep.left, rep.right) +
                  "): this is an implementation bug in the checker, not a "
                  "counterexample to the underlying equivalence";
  }
  return rep;
}

TheoremReport verify_theorem_3_4(const Model& m, int group,
                                 const Formula& phi, EvalOptions opts) {
  GroupRef g = named_group(m, group);
  TheoremReport rep;
  rep.theorem = 34;

  Evaluator ev(m, opts);
  std::vector<Extension> believes_phi;
  believes_phi.reserve(m.agent_count());
  for (int a = 0; a < m.agent_count(); ++a)
    believes_phi.push_back(ev.extension(Formula::believes(a, phi)));

  rep.left = true;
  std::optional<Point> left_witness;
  for (int p = 0; p < m.point_count() && rep.left; ++p) {
    uint64_t active = m.membership_mask(group, p) & m.acting_mask(group, p);
    for (int a = 0; a < m.agent_count(); ++a) {
      if (!((active >> a) & 1u)) continue;
      if (!believes_phi[a].holds(p)) {
        rep.left = false;
        left_witness = m.point_at(p);
        break;
      }
    }
  }

  Extension ca = ev.extension(Formula::common_a(g, phi));
  rep.right = ca.count() == m.point_count();

  rep.equivalence_respected = rep.left == rep.right;
  if (rep.equivalence_respected) {
    rep.message = "acting members' belief and everywhere action-stamped "
                  "common belief agree (" +
                  side_note(rep.left, rep.right) + ")";
  } else {
    if (!rep.right) {
      for (int p = 0; p < m.point_count(); ++p)
        if (!ca.holds(p)) {
          rep.witness = m.point_at(p);
          break;
        }
    } else {
      rep.witness = left_witness;
    }
    rep.message = "equivalence violated (" + side_note(rep.left, rep.right) +
                  "): this is an implementation bug in the checker, not a "
                  "counterexample to the underlying equivalence";
  }
  return rep;
}

Formula chi_alw_encoding(const Model& m, int group) {
  if (group < 0 || group >= m.group_count())
    throw LookupError("unknown group index " + std::to_string(group));
  Formula body;
  for (int a = 0; a < m.agent_count(); ++a) {
    Formula member = Formula::atom(FlagRef{FlagRef::Member, a, group}, 1);
    Formula should = Formula::atom(FlagRef{FlagRef::ShouldAct, a, group}, 1);
    Formula acting = Formula::atom(FlagRef{FlagRef::Acting, a, group}, 1);
    Formula guard =
        Formula::implies(member, Formula::implies(should, acting));
    body = body.valid() ? Formula::conj(body, guard) : guard;
  }
  return Formula::alw(body);
}

bool chi_alw_encoding_equiv(const Model& m, int group, EvalOptions opts) {
  Evaluator ev(m, opts);
  Extension direct = ev.extension(Formula::chi(named_group(m, group)));
  Extension encoded = ev.extension(chi_alw_encoding(m, group));
  return direct.bits() == encoded.bits();
}

}  // namespace beliefmc
