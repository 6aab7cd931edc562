#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "beliefmc/checker.hpp"
#include "beliefmc/formula.hpp"
#include "beliefmc/model.hpp"

namespace beliefmc {

// Joint-behavior check: every member currently carrying out their part must
// believe, right there, that the whole group plan gets carried out.
struct JbReport {
  bool holds = true;
  std::vector<std::pair<Point, int>> violations;  // (point, agent), sorted
};

// Model-level equivalence between a property of the flags/beliefs and a
// common-belief formula.  The two sides must agree on every valid model; a
// mismatch is evidence of a checker bug, and message says so.
struct TheoremReport {
  int theorem = 0;  // 12 for the chi pair, 34 for the general pair
  bool left = false;
  bool right = false;
  bool equivalence_respected = true;
  std::optional<Point> witness;  // side-specific failure location
  std::string message;
};

Extension chi_extension(const Model& m, int group, EvalOptions opts = {});
JbReport check_jb(const Model& m, int group, EvalOptions opts = {});

// left: JB holds; right: Ca{group}(chi{group}) at every point.
TheoremReport verify_theorem_1_2(const Model& m, int group,
                                 EvalOptions opts = {});
// left: at every point, every acting member believes phi;
// right: Ca{group}(phi) at every point.
TheoremReport verify_theorem_3_4(const Model& m, int group,
                                 const Formula& phi, EvalOptions opts = {});

// ALW-based rewriting of chi over flag atoms, and the check that it has the
// same extension as the chi operator itself.
Formula chi_alw_encoding(const Model& m, int group);
bool chi_alw_encoding_equiv(const Model& m, int group, EvalOptions opts = {});

// Name-resolving conveniences; throw LookupError on unknown group.
int resolve_group(const Model& m, const std::string& name);

}  // namespace beliefmc
