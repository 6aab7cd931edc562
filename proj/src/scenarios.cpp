#include "beliefmc/scenarios.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <stdexcept>

#include "beliefmc/checker.hpp"
#include "beliefmc/properties.hpp"
#include "beliefmc/reference.hpp"

namespace beliefmc {
namespace {

Expectation expect_formula(std::string formula, std::string where,
                           bool expected, std::string note) {
  Expectation e;
  e.kind = Expectation::FormulaHolds;
  e.formula = std::move(formula);
  e.where = std::move(where);
  e.expected = expected;
  e.note = std::move(note);
  return e;
}

Expectation expect_jb(std::string group, bool expected, int violations,
                      std::string note) {
  Expectation e;
  e.kind = Expectation::Jb;
  e.group = std::move(group);
  e.expected = expected;
  e.expected_violations = violations;
  e.note = std::move(note);
  return e;
}

Expectation expect_valid(std::string note) {
  Expectation e;
  e.kind = Expectation::ValidatePasses;
  e.expected = true;
  e.note = std::move(note);
  return e;
}

void self_loops(ModelBuilder& b, const std::string& agent,
                const std::string& run, int from, int to) {
  for (int t = from; t < to; ++t) b.belief(agent, run, t, run, t);
}

}  // namespace

std::vector<Point> expectation_points(const Model& m,
                                      const std::string& where) {
  std::vector<Point> out;
  if (where == "all") {
    for (int p = 0; p < m.point_count(); ++p) out.push_back(m.point_at(p));
    return out;
  }
  auto comma = where.find(',');
  if (comma != std::string::npos) {
    std::string run = where.substr(0, comma);
    int r = m.run_index(run);
    if (r < 0) throw LookupError("unknown run \"" + run + "\"");
    int t = std::stoi(where.substr(comma + 1));
    Point p{r, t};
    if (!m.valid_point(p))
      throw LookupError("point " + where + " is outside the run");
    out.push_back(p);
    return out;
  }
  int r = m.run_index(where);
  if (r < 0) throw LookupError("unknown run \"" + where + "\"");
  for (int t = 0; t < m.horizon(r); ++t) out.push_back(Point{r, t});
  return out;
}

std::vector<ExpectationOutcome> run_expectations(const Scenario& s,
                                                 bool use_reference) {
  const Model& m = s.model;
  std::vector<ExpectationOutcome> results;
  results.reserve(s.expectations.size());

  Evaluator ev(m, EvalOptions{.parallel = false,
                              .skip_validation_check = true});
  RefEvaluator ref(m);

  for (const Expectation& e : s.expectations) {
    ExpectationOutcome out;
    switch (e.kind) {
      case Expectation::ValidatePasses: {
        bool passed = m.validation().passed;
        out.passed = passed == e.expected;
        out.detail = std::string("model validation ") +
                     (passed ? "passed" : "failed");
        break;
      }
      case Expectation::FormulaHolds: {
        Formula f = parse(e.formula, m);
        out.passed = true;
        for (Point p : expectation_points(m, e.where)) {
          bool got = use_reference ? ref.holds(f, p) : ev.check(f, p);
          if (got != e.expected) {
            out.passed = false;
            out.detail = e.formula + " expected " +
                         (e.expected ? "true" : "false") + " but is " +
                         (got ? "true" : "false") + " at " +
                         point_label(m, p);
            break;
          }
        }
        if (out.passed)
          out.detail = e.formula + " is " +
                       (e.expected ? "true" : "false") + " at " + e.where;
        break;
      }
      case Expectation::Jb: {
        JbReport rep = check_jb(m, resolve_group(m, e.group));
        out.passed = rep.holds == e.expected &&
                     (e.expected_violations < 0 ||
                      static_cast<int>(rep.violations.size()) ==
                          e.expected_violations);
        out.detail = "joint behavior for " + e.group + ": " +
                     (rep.holds ? "holds" : "fails") + " with " +
                     std::to_string(rep.violations.size()) + " violation(s)";
        break;
      }
    }
    results.push_back(std::move(out));
  }
  return results;
}

// --------------------------------------------------------------------------
// Two generals, fixed schedule: traps on day one, the attack scheduled for
// noon two days later.  The courier who confirms the trap-laying may be
// captured, so at no moment are both generals simultaneously certain of the
// plan; each is certain at their own scheduled moment.
Scenario build_generals_timestamped() {
  ModelBuilder b;
  b.agent("Y").agent("Z");
  b.variable("TRAPS", {"0", "1"})
      .variable("ARRIVED", {"0", "1"})
      .variable("PLAN", {"0", "1"});
  b.run("rGo", 4).run("rCapt", 4).run("rQuiet", 4);
  for (int t = 0; t < 4; ++t) {
    b.value("rGo", t, "TRAPS", "1");
    b.value("rCapt", t, "TRAPS", "1");
    b.value("rQuiet", t, "TRAPS", "0");
    b.value("rGo", t, "ARRIVED", t >= 2 ? "1" : "0");
    b.value("rCapt", t, "ARRIVED", "0");
    b.value("rQuiet", t, "ARRIVED", "0");
    b.value("rGo", t, "PLAN", "1");
    b.value("rCapt", t, "PLAN", "0");
    b.value("rQuiet", t, "PLAN", "0");
  }

  // Y lays the traps at time 0 and is certain of the plan then; once the
  // courier is away (time >= 1) Y cannot rule out the capture run.
  b.belief("Y", "rGo", 0, "rGo", 0);
  for (int t = 1; t < 4; ++t) b.belief("Y", "rGo", t, "rCapt", t);
  b.belief("Y", "rCapt", 0, "rGo", 0);
  self_loops(b, "Y", "rCapt", 1, 4);
  self_loops(b, "Y", "rQuiet", 0, 4);

  // Z hears nothing until the courier arrives at time 2; before that Z
  // cannot tell the mission from the quiet run.
  b.belief("Z", "rGo", 0, "rQuiet", 0);
  b.belief("Z", "rGo", 1, "rQuiet", 1);
  b.belief("Z", "rGo", 2, "rGo", 2);
  b.belief("Z", "rGo", 3, "rGo", 3);
  b.belief("Z", "rCapt", 0, "rQuiet", 0);
  self_loops(b, "Z", "rCapt", 1, 4);
  self_loops(b, "Z", "rQuiet", 0, 4);

  b.rigid_group("YZ", {"Y", "Z"});
  b.stamp("plan");
  for (const char* r : {"rGo", "rCapt", "rQuiet"}) {
    b.stamp_time("plan", "Y", r, 0);
    b.stamp_time("plan", "Z", r, 2);
  }
  b.acting("YZ", "Y", "rGo", 0).acting("YZ", "Y", "rCapt", 0);
  b.acting("YZ", "Z", "rGo", 2);
  b.should("YZ", "Y", "rGo", 0).should("YZ", "Y", "rCapt", 0);
  b.should("YZ", "Z", "rGo", 2).should("YZ", "Z", "rCapt", 2);

  Scenario s{"generals1",
             "Two generals coordinate by schedule, not by shared certainty",
             b.build(),
             {}};
  s.expectations = {
      expect_valid("the built belief structure is serial, transitive and "
                   "Euclidean"),
      expect_formula("C{Y,Z}(PLAN=1)", "rGo", false,
                     "the courier may be captured, so no moment of the "
                     "mission run gives both generals shared certainty"),
      expect_formula("C[t:plan]{Y,Z}(PLAN=1)", "rGo", true,
                     "each general is certain of the plan at their own "
                     "scheduled moment, which is all the schedule needs"),
      expect_formula("chi{YZ}", "rGo", true,
                     "on the mission run both generals do their part on "
                     "time"),
      expect_formula("chi{YZ}", "rCapt", false,
                     "in the capture run Z never attacks although the plan "
                     "called for it"),
      expect_jb("YZ", true, 0,
                "whenever either general acts, he believes the whole plan "
                "is being carried out"),
  };
  return s;
}

// --------------------------------------------------------------------------
// Two generals, weather-dependent schedule: Y lays two trap lines on days
// that depend on the storm, so no single clock time covers his certainty in
// every run; acting moments do.
Scenario build_generals_actionstamped() {
  ModelBuilder b;
  b.agent("Y").agent("Z");
  b.variable("PLAN", {"0", "1"})
      .variable("TRAPS_S", {"0", "1"})
      .variable("TRAPS_W", {"0", "1"})
      .variable("ARRIVED", {"0", "1"});
  b.run("rGo", 5).run("rLate", 5).run("rCapt", 5).run("rQuiet", 5);

  auto fill = [&](const char* run, const char* var,
                  std::initializer_list<int> vals) {
    int t = 0;
    for (int v : vals) b.value(run, t++, var, v ? "1" : "0");
  };
  fill("rGo", "PLAN", {1, 1, 1, 1, 1});
  fill("rLate", "PLAN", {1, 1, 1, 1, 1});
  fill("rCapt", "PLAN", {0, 0, 0, 0, 0});
  fill("rQuiet", "PLAN", {0, 0, 0, 0, 0});
  fill("rGo", "TRAPS_S", {1, 1, 1, 1, 1});
  fill("rLate", "TRAPS_S", {0, 0, 1, 1, 1});
  fill("rCapt", "TRAPS_S", {1, 1, 1, 1, 1});
  fill("rQuiet", "TRAPS_S", {0, 0, 0, 0, 0});
  fill("rGo", "TRAPS_W", {0, 1, 1, 1, 1});
  fill("rLate", "TRAPS_W", {0, 0, 0, 1, 1});
  fill("rCapt", "TRAPS_W", {0, 1, 1, 1, 1});
  fill("rQuiet", "TRAPS_W", {0, 0, 0, 0, 0});
  fill("rGo", "ARRIVED", {0, 0, 0, 0, 1});
  fill("rLate", "ARRIVED", {0, 0, 0, 0, 1});
  fill("rCapt", "ARRIVED", {0, 0, 0, 0, 0});
  fill("rQuiet", "ARRIVED", {0, 0, 0, 0, 0});

  // Y: in the fair-weather run he works days 0-1 and afterwards cannot
  // rule out the courier's capture; in the stormy run he works days 2-3,
  // and before the storm clears he cannot tell whether the landing
  // happened at all.
  b.belief("Y", "rGo", 0, "rGo", 0);
  b.belief("Y", "rGo", 1, "rGo", 1);
  for (int t = 2; t < 5; ++t) b.belief("Y", "rGo", t, "rCapt", t);
  for (int t = 0; t < 2; ++t) {
    b.belief("Y", "rLate", t, "rLate", t);
    b.belief("Y", "rLate", t, "rQuiet", t);
    b.belief("Y", "rQuiet", t, "rLate", t);
    b.belief("Y", "rQuiet", t, "rQuiet", t);
  }
  self_loops(b, "Y", "rLate", 2, 5);
  b.belief("Y", "rCapt", 0, "rGo", 0);
  b.belief("Y", "rCapt", 1, "rGo", 1);
  self_loops(b, "Y", "rCapt", 2, 5);
  self_loops(b, "Y", "rQuiet", 2, 5);

  // Z hears nothing until day 4; at day 4 Z has arrived but cannot tell
  // which schedule Y ended up following.
  for (int t = 0; t < 4; ++t) b.belief("Z", "rGo", t, "rQuiet", t);
  b.belief("Z", "rGo", 4, "rGo", 4);
  b.belief("Z", "rGo", 4, "rLate", 4);
  for (int t = 0; t < 4; ++t) b.belief("Z", "rLate", t, "rQuiet", t);
  b.belief("Z", "rLate", 4, "rGo", 4);
  b.belief("Z", "rLate", 4, "rLate", 4);
  b.belief("Z", "rCapt", 0, "rQuiet", 0);
  self_loops(b, "Z", "rCapt", 1, 5);
  self_loops(b, "Z", "rQuiet", 0, 5);

  b.rigid_group("YZ", {"Y", "Z"});
  // Candidate meeting schedules: Y certain at day k, Z at day 4.  None of
  // them covers Y's certainty window in both trap-laying runs.
  for (int k = 0; k < 5; ++k) {
    std::string name = "t" + std::to_string(k);
    b.stamp(name);
    for (const char* r : {"rGo", "rLate", "rCapt", "rQuiet"}) {
      b.stamp_time(name, "Y", r, k);
      b.stamp_time(name, "Z", r, 4);
    }
  }

  b.acting("YZ", "Y", "rGo", 0).acting("YZ", "Y", "rGo", 1);
  b.acting("YZ", "Y", "rLate", 2).acting("YZ", "Y", "rLate", 3);
  b.acting("YZ", "Y", "rCapt", 0).acting("YZ", "Y", "rCapt", 1);
  b.acting("YZ", "Z", "rGo", 4).acting("YZ", "Z", "rLate", 4);
  b.should("YZ", "Y", "rGo", 0).should("YZ", "Y", "rGo", 1);
  b.should("YZ", "Y", "rLate", 2).should("YZ", "Y", "rLate", 3);
  b.should("YZ", "Y", "rCapt", 0).should("YZ", "Y", "rCapt", 1);
  b.should("YZ", "Z", "rGo", 4).should("YZ", "Z", "rLate", 4);
  b.should("YZ", "Z", "rCapt", 4);

  Scenario s{"generals2",
             "Weather-shifted trap laying defeats every fixed schedule",
             b.build(),
             {}};
  s.expectations.push_back(
      expect_valid("the built belief structure is serial, transitive and "
                   "Euclidean"));
  for (int k = 0; k < 5; ++k) {
    s.expectations.push_back(expect_formula(
        "C[t:t" + std::to_string(k) + "]{Y,Z}(PLAN=1)", "rGo", false,
        "with Y's certainty pinned to day " + std::to_string(k) +
            ", some run that the generals cannot rule out has Y unsure of "
            "the plan at that day"));
  }
  s.expectations.push_back(expect_formula(
      "Ca{YZ}(PLAN=1)", "rGo", true,
      "at every moment either general actually acts, he is certain of the "
      "plan, whatever the weather did"));
  s.expectations.push_back(expect_formula(
      "Ca{YZ}(PLAN=1)", "rLate", true,
      "the stormy schedule shifts the acting days but not the certainty at "
      "them"));
  s.expectations.push_back(expect_formula(
      "chi{YZ}", "rGo", true, "fair weather: everyone acts as planned"));
  s.expectations.push_back(expect_formula(
      "chi{YZ}", "rCapt", false,
      "in the capture run Z never attacks although the plan called for "
      "it"));
  s.expectations.push_back(expect_jb(
      "YZ", true, 0,
      "whoever acts believes the whole plan is being carried out"));
  return s;
}

// --------------------------------------------------------------------------
// Firefighters: the on-scene crew changes over time, so the group operators
// quantify over whoever is on scene at each moment.  F1 has an acting flag
// after leaving the scene; the membership guard must ignore it.
Scenario build_firefighters_indexical() {
  ModelBuilder b;
  b.agent("F1").agent("F2").agent("F3").agent("V");
  b.variable("GOAL", {"0", "1"});
  b.run("rMain", 4).run("rAlt", 4);
  for (int t = 0; t < 4; ++t) {
    b.value("rMain", t, "GOAL", "1");
    b.value("rAlt", t, "GOAL", "0");
  }

  // F1 fights until relieved at time 3; once off scene he only knows the
  // alternative playbook.  In the alternative run he initially assumes the
  // main plan is in force.
  b.belief("F1", "rMain", 0, "rMain", 0);
  b.belief("F1", "rMain", 1, "rMain", 1);
  b.belief("F1", "rMain", 2, "rMain", 2);
  b.belief("F1", "rMain", 3, "rAlt", 3);
  b.belief("F1", "rAlt", 0, "rMain", 0);
  b.belief("F1", "rAlt", 1, "rMain", 1);
  self_loops(b, "F1", "rAlt", 2, 4);

  b.belief("F2", "rMain", 0, "rMain", 0);
  b.belief("F2", "rMain", 1, "rMain", 1);
  b.belief("F2", "rMain", 2, "rMain", 2);
  b.belief("F2", "rMain", 3, "rMain", 3);
  b.belief("F2", "rAlt", 0, "rMain", 0);
  b.belief("F2", "rAlt", 1, "rMain", 1);
  self_loops(b, "F2", "rAlt", 2, 4);

  self_loops(b, "F3", "rMain", 0, 4);
  self_loops(b, "F3", "rAlt", 0, 4);
  self_loops(b, "V", "rMain", 0, 4);
  self_loops(b, "V", "rAlt", 0, 4);

  b.group("scene");
  b.member("scene", "rMain", 0, "F1");
  b.member("scene", "rMain", 1, "F1").member("scene", "rMain", 1, "F2");
  b.member("scene", "rMain", 2, "F1")
      .member("scene", "rMain", 2, "F2")
      .member("scene", "rMain", 2, "F3");
  b.member("scene", "rMain", 3, "F2").member("scene", "rMain", 3, "F3");
  b.member("scene", "rAlt", 0, "F1");
  b.member("scene", "rAlt", 1, "F1").member("scene", "rAlt", 1, "F2");
  b.member("scene", "rAlt", 2, "F1").member("scene", "rAlt", 2, "F2");
  b.member("scene", "rAlt", 3, "F2");
  b.rigid_group("volunteers", {"V"});

  b.acting("scene", "F1", "rMain", 0);
  b.acting("scene", "F2", "rMain", 1);
  b.acting("scene", "F3", "rMain", 2);
  b.acting("scene", "F2", "rMain", 3);
  b.acting("scene", "F1", "rMain", 3);  // off scene by now; must be ignored
  b.acting("scene", "F1", "rAlt", 0);
  b.acting("scene", "F2", "rAlt", 1);
  b.acting("volunteers", "V", "rMain", 1);
  b.should("scene", "F1", "rMain", 0);
  b.should("scene", "F2", "rMain", 1);
  b.should("scene", "F3", "rMain", 2);
  b.should("scene", "F2", "rMain", 3);
  b.should("scene", "F1", "rAlt", 0);
  b.should("scene", "F2", "rAlt", 1);
  b.should("scene", "F2", "rAlt", 3);
  b.should("volunteers", "V", "rMain", 1);

  Scenario s{"firefighters",
             "An on-scene crew that grows and shrinks during the operation",
             b.build(),
             {}};
  s.expectations = {
      expect_valid("the built belief structure is serial, transitive and "
                   "Euclidean"),
      expect_formula("MEMBER_F3_scene=1", "rMain,0", false,
                     "F3 has not arrived yet at the start"),
      expect_formula("MEMBER_F3_scene=1", "rMain,2", true,
                     "F3 is on scene once the third engine arrives"),
      expect_formula("ACTING_F1_scene=1", "rMain,3", true,
                     "the flag exists, but F1 has left the scene by then"),
      expect_formula("Ea{scene}(GOAL=1)", "rMain", true,
                     "every on-scene firefighter believes in the operation "
                     "at each moment they act"),
      expect_formula("Ca{scene}(GOAL=1)", "rMain", true,
                     "certainty at acting moments propagates through the "
                     "whole crew rotation; F1's stale off-scene flag does "
                     "not poison it"),
      expect_formula("chi{scene}", "rMain", true,
                     "everyone on scene does their part on the main run"),
      expect_formula("chi{scene}", "rAlt", false,
                     "in the alternative run F2 skips the late shift"),
      expect_jb("scene", true, 0,
                "every firefighter who acts believes the crew as a whole "
                "plays its part"),
  };
  return s;
}

// --------------------------------------------------------------------------
// Search and rescue: rescuers stabilize the site early, a robot hauls the
// equipment later; its arrival may be delayed by hours or not happen.
Scenario build_search_rescue() {
  ModelBuilder b;
  b.agent("R").agent("B");
  b.variable("PLAN", {"0", "1"})
      .variable("ARRIVED", {"0", "1"})
      .variable("STABLE", {"0", "1"});
  b.run("rOnTime", 5).run("rDelay", 5).run("rNever", 5);

  auto fill = [&](const char* run, const char* var,
                  std::initializer_list<int> vals) {
    int t = 0;
    for (int v : vals) b.value(run, t++, var, v ? "1" : "0");
  };
  fill("rOnTime", "PLAN", {1, 1, 1, 1, 1});
  fill("rDelay", "PLAN", {1, 1, 1, 1, 1});
  fill("rNever", "PLAN", {0, 0, 0, 0, 0});
  fill("rOnTime", "ARRIVED", {0, 0, 1, 1, 1});
  fill("rDelay", "ARRIVED", {0, 0, 0, 1, 1});
  fill("rNever", "ARRIVED", {0, 0, 0, 0, 0});
  fill("rOnTime", "STABLE", {0, 0, 1, 1, 1});
  fill("rDelay", "STABLE", {0, 0, 1, 1, 1});
  fill("rNever", "STABLE", {0, 0, 1, 1, 1});

  // The rescuers work inside the collapse; early on they know the mission
  // is live but not the robot's schedule, later they cannot even rule out
  // that it broke down entirely.
  for (const char* r : {"rOnTime", "rDelay", "rNever"}) {
    for (int t = 0; t < 2; ++t) {
      b.belief("R", r, t, "rOnTime", t);
      b.belief("R", r, t, "rDelay", t);
    }
    for (int t = 2; t < 5; ++t) {
      b.belief("R", r, t, "rOnTime", t);
      b.belief("R", r, t, "rDelay", t);
      b.belief("R", r, t, "rNever", t);
    }
  }

  // The robot, before its own arrival, runs on a pessimistic default; once
  // on site it is certain of its run.
  b.belief("B", "rOnTime", 0, "rNever", 0);
  b.belief("B", "rOnTime", 1, "rNever", 1);
  self_loops(b, "B", "rOnTime", 2, 5);
  for (int t = 0; t < 3; ++t) b.belief("B", "rDelay", t, "rNever", t);
  self_loops(b, "B", "rDelay", 3, 5);
  self_loops(b, "B", "rNever", 0, 5);

  b.rigid_group("team", {"R", "B"});
  for (const char* r : {"rOnTime", "rDelay", "rNever"}) {
    b.acting("team", "R", r, 0).acting("team", "R", r, 1);
    b.should("team", "R", r, 0).should("team", "R", r, 1);
  }
  b.acting("team", "B", "rOnTime", 2).acting("team", "B", "rOnTime", 3);
  b.acting("team", "B", "rDelay", 3).acting("team", "B", "rDelay", 4);
  b.should("team", "B", "rOnTime", 2).should("team", "B", "rOnTime", 3);
  b.should("team", "B", "rDelay", 3).should("team", "B", "rDelay", 4);

  Scenario s{"searchrescue",
             "Rescuers and a haulage robot coordinate around a delay",
             b.build(),
             {}};
  s.expectations = {
      expect_valid("the built belief structure is serial, transitive and "
                   "Euclidean"),
      expect_formula("C{R,B}(PLAN=1)", "rDelay", false,
                     "with the robot late, there is no moment at which the "
                     "team shares certainty in the mission"),
      expect_formula("Ca{team}(PLAN=1)", "rDelay", true,
                     "each party is certain of the mission whenever it "
                     "actually does its part, delay or not"),
      expect_formula("Ea{team}(PLAN=1)", "rNever", true,
                     "the robot never acts in its breakdown run, so only "
                     "the rescuers' acting moments count there"),
      expect_formula("chi{team}", "all", true,
                     "in every run, whoever is supposed to work does work"),
      expect_jb("team", true, 0,
                "acting always comes with belief in the joint effort"),
  };
  return s;
}

// --------------------------------------------------------------------------
// Two burglars who independently bypass their own halves of the alarm; the
// loot requires both, yet neither has any idea the other is helping.
Scenario build_bank_robbers() {
  ModelBuilder b;
  b.agent("J").agent("H");
  b.variable("LOOT", {"0", "1"})
      .variable("SEC_J_DOWN", {"0", "1"})
      .variable("SEC_H_DOWN", {"0", "1"});
  b.run("rBoth", 3).run("rJ", 3).run("rH", 3);

  auto fill = [&](const char* run, const char* var,
                  std::initializer_list<int> vals) {
    int t = 0;
    for (int v : vals) b.value(run, t++, var, v ? "1" : "0");
  };
  fill("rBoth", "LOOT", {0, 0, 1});
  fill("rJ", "LOOT", {0, 0, 0});
  fill("rH", "LOOT", {0, 0, 0});
  fill("rBoth", "SEC_J_DOWN", {0, 1, 1});
  fill("rJ", "SEC_J_DOWN", {0, 1, 1});
  fill("rH", "SEC_J_DOWN", {0, 0, 0});
  fill("rBoth", "SEC_H_DOWN", {0, 1, 1});
  fill("rJ", "SEC_H_DOWN", {0, 0, 0});
  fill("rH", "SEC_H_DOWN", {0, 1, 1});

  // Each burglar only sees his own handiwork: in the actual run he takes
  // himself to be alone on the job.
  for (int t = 0; t < 3; ++t) b.belief("J", "rBoth", t, "rJ", t);
  self_loops(b, "J", "rJ", 0, 3);
  self_loops(b, "J", "rH", 0, 3);
  for (int t = 0; t < 3; ++t) b.belief("H", "rBoth", t, "rH", t);
  self_loops(b, "H", "rH", 0, 3);
  self_loops(b, "H", "rJ", 0, 3);

  b.rigid_group("heist", {"J", "H"});
  b.acting("heist", "J", "rBoth", 1);
  b.acting("heist", "H", "rBoth", 1);
  for (const char* r : {"rBoth", "rJ", "rH"}) {
    b.should("heist", "J", r, 1);
    b.should("heist", "H", r, 1);
  }

  Scenario s{"bankrobbers",
             "Both halves of the alarm go down, yet nobody is cooperating",
             b.build(),
             {}};
  s.expectations = {
      expect_valid("the built belief structure is serial, transitive and "
                   "Euclidean"),
      expect_formula("chi{heist}", "rBoth", true,
                     "on the actual night both burglars do their part"),
      expect_jb("heist", false, 2,
                "each burglar acts with no inkling of the other, so both "
                "acting moments violate the belief requirement"),
      expect_formula("Ca{heist}(chi{heist})", "rBoth", false,
                     "from either burglar's acting moment one step of "
                     "belief lands in a run where the job stays half "
                     "done"),
  };
  return s;
}

std::vector<std::string> scenario_names() {
  return {"generals1", "generals2", "firefighters", "searchrescue",
          "bankrobbers"};
}

Scenario build_scenario(const std::string& name) {
  if (name == "generals1") return build_generals_timestamped();
  if (name == "generals2") return build_generals_actionstamped();
  if (name == "firefighters") return build_firefighters_indexical();
  if (name == "searchrescue") return build_search_rescue();
  if (name == "bankrobbers") return build_bank_robbers();
  throw LookupError("unknown scenario \"" + name + "\"");
}

// --------------------------------------------------------------------------

Model random_model(uint64_t seed, const RandomModelParams& params) {
  if (params.min_runs < 1 || params.max_runs < params.min_runs ||
      params.min_horizon < 1 || params.max_horizon < params.min_horizon ||
      params.min_agents < 1 || params.max_agents < params.min_agents ||
      params.max_agents > 8 || params.max_points < 1 ||
      params.max_points > 64 || params.flag_density < 0.0 ||
      params.flag_density > 1.0 ||
      params.min_runs * params.min_horizon > params.max_points)
    throw std::invalid_argument(
        "random_model: bounds outside the supported desk scale");

  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  std::bernoulli_distribution flag(params.flag_density);

  const int nagents = pick(params.min_agents, params.max_agents);
  const int nruns = pick(params.min_runs, params.max_runs);
  std::vector<int> horizon(nruns);
  int total = 0;
  for (int r = 0; r < nruns; ++r) {
    horizon[r] = pick(params.min_horizon, params.max_horizon);
    total += horizon[r];
  }
  while (total > params.max_points) {
    for (int r = 0; r < nruns && total > params.max_points; ++r)
      if (horizon[r] > 1) {
        --horizon[r];
        --total;
      }
  }

  std::vector<int> offset(nruns);
  int npoints = 0;
  for (int r = 0; r < nruns; ++r) {
    offset[r] = npoints;
    npoints += horizon[r];
  }
  auto run_of = [&](int p) {
    int r = 0;
    while (r + 1 < nruns && offset[r + 1] <= p) ++r;
    return r;
  };

  ModelBuilder b;
  std::vector<std::string> agents;
  for (int a = 0; a < nagents; ++a) {
    agents.push_back("a" + std::to_string(a));
    b.agent(agents.back());
  }
  b.variable("x0", {"0", "1"});
  b.variable("x1", {"0", "1", "2"});
  std::vector<std::string> runs;
  for (int r = 0; r < nruns; ++r) {
    runs.push_back("r" + std::to_string(r));
    b.run(runs.back(), horizon[r]);
  }
  for (int r = 0; r < nruns; ++r)
    for (int t = 0; t < horizon[r]; ++t) {
      b.value(runs[r], t, "x0", std::to_string(pick(0, 1)));
      b.value(runs[r], t, "x1", std::to_string(pick(0, 2)));
    }

  // Random edges, then closure into clusters: whenever p points at q their
  // successor sets are merged, which lands exactly in the serial,
  // transitive, Euclidean family.  The result is re-checked by the regular
  // validator in the test suite rather than trusted.
  for (int a = 0; a < nagents; ++a) {
    std::vector<uint64_t> succ(npoints, 0);
    for (int p = 0; p < npoints; ++p) {
      succ[p] |= uint64_t{1} << pick(0, npoints - 1);
      if (pick(0, 99) < 35) succ[p] |= uint64_t{1} << pick(0, npoints - 1);
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (int p = 0; p < npoints; ++p) {
        uint64_t row = succ[p];
        while (row) {
          int q = std::countr_zero(row);
          row &= row - 1;
          uint64_t merged = succ[p] | succ[q];
          if (merged != succ[q]) {
            succ[q] = merged;
            changed = true;
          }
          if (merged != succ[p]) {
            succ[p] = merged;
            changed = true;
          }
        }
      }
    }
    for (int p = 0; p < npoints; ++p) {
      int rp = run_of(p);
      uint64_t row = succ[p];
      while (row) {
        int q = std::countr_zero(row);
        row &= row - 1;
        int rq = run_of(q);
        b.belief(agents[a], runs[rp], p - offset[rp], runs[rq],
                 q - offset[rq]);
      }
    }
  }

  std::vector<std::string> group_members;
  uint64_t rigid = static_cast<uint64_t>(
      pick(1, static_cast<int>((uint64_t{1} << nagents) - 1)));
  for (int a = 0; a < nagents; ++a)
    if ((rigid >> a) & 1u) group_members.push_back(agents[a]);
  b.rigid_group("g0", group_members);

  b.group("g1");
  for (int r = 0; r < nruns; ++r)
    for (int t = 0; t < horizon[r]; ++t) {
      int mask = pick(0, static_cast<int>((uint64_t{1} << nagents) - 1));
      for (int a = 0; a < nagents; ++a)
        if ((mask >> a) & 1) b.member("g1", runs[r], t, agents[a]);
    }

  b.stamp("sync");
  for (int a = 0; a < nagents; ++a)
    for (int r = 0; r < nruns; ++r)
      b.stamp_time("sync", agents[a], runs[r], pick(0, horizon[r] - 1));

  for (const char* g : {"g0", "g1"})
    for (int a = 0; a < nagents; ++a)
      for (int r = 0; r < nruns; ++r)
        for (int t = 0; t < horizon[r]; ++t) {
          if (flag(rng)) b.acting(g, agents[a], runs[r], t);
          if (flag(rng)) b.should(g, agents[a], runs[r], t);
        }

  return b.build();
}

Formula random_formula(std::mt19937_64& rng, const Model& m,
                       const RandomFormulaParams& params) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  auto random_group = [&]() {
    GroupRef g;
    if (m.group_count() > 0 && pick(0, 1) == 0) {
      g.named = pick(0, m.group_count() - 1);
    } else {
      int hi = static_cast<int>((uint64_t{1} << m.agent_count()) - 1);
      g.rigid_mask = static_cast<uint64_t>(pick(1, hi));
    }
    return g;
  };

  auto random_atom = [&]() {
    bool use_flag =
        params.allow_flags && m.group_count() > 0 &&
        (m.variable_count() == 0 || pick(0, 3) == 0);
    if (use_flag) {
      FlagRef fr;
      fr.kind = static_cast<FlagRef::Kind>(pick(0, 2));
      fr.agent = pick(0, m.agent_count() - 1);
      fr.group = pick(0, m.group_count() - 1);
      return Formula::atom(fr, pick(0, 1));
    }
    int v = pick(0, m.variable_count() - 1);
    return Formula::atom(v,
                         pick(0, static_cast<int>(m.domain(v).size()) - 1));
  };

  std::function<Formula(int, int)> gen = [&](int depth,
                                             int cdepth) -> Formula {
    if (depth <= 0) return random_atom();
    enum Op {
      OpAtom,
      OpNot,
      OpAnd,
      OpBelieves,
      OpEveryone,
      OpCommon,
      OpEveryoneT,
      OpCommonT,
      OpEveryoneA,
      OpCommonA,
      OpChi,
      OpAlw
    };
    std::vector<Op> ops = {OpAtom, OpNot,      OpAnd,       OpBelieves,
                           OpEveryone, OpEveryoneA, OpAlw};
    if (m.stamp_count() > 0) ops.push_back(OpEveryoneT);
    if (cdepth > 0) {
      ops.push_back(OpCommon);
      ops.push_back(OpCommonA);
      ops.push_back(OpChi);
      if (m.stamp_count() > 0) ops.push_back(OpCommonT);
    }
    switch (ops[pick(0, static_cast<int>(ops.size()) - 1)]) {
      case OpAtom:
        return random_atom();
      case OpNot:
        return Formula::negation(gen(depth - 1, cdepth));
      case OpAnd:
        return Formula::conj(gen(depth - 1, cdepth),
                             gen(depth - 1, cdepth));
      case OpBelieves:
        return Formula::believes(pick(0, m.agent_count() - 1),
                                 gen(depth - 1, cdepth));
      case OpEveryone:
        return Formula::everyone(random_group(), gen(depth - 1, cdepth));
      case OpCommon:
        return Formula::common(random_group(), gen(depth - 1, cdepth - 1));
      case OpEveryoneT:
        return Formula::everyone_t(random_group(),
                                   pick(0, m.stamp_count() - 1),
                                   gen(depth - 1, cdepth));
      case OpCommonT:
        return Formula::common_t(random_group(),
                                 pick(0, m.stamp_count() - 1),
                                 gen(depth - 1, cdepth - 1));
      case OpEveryoneA:
        return Formula::everyone_a(random_group(), gen(depth - 1, cdepth));
      case OpCommonA:
        return Formula::common_a(random_group(), gen(depth - 1, cdepth - 1));
      case OpChi:
        return Formula::chi(random_group());
      case OpAlw:
        return Formula::alw(gen(depth - 1, cdepth));
    }
    return random_atom();
  };

  Formula f = gen(params.max_depth, params.max_common_depth);
  if (params.require_common) {
    bool has_common = false;
    for (const Formula& g : subformulas(f))
      if (g.kind() == Kind::Common || g.kind() == Kind::CommonT ||
          g.kind() == Kind::CommonA)
        has_common = true;
    if (!has_common) {
      int which = pick(0, m.stamp_count() > 0 ? 2 : 1);
      GroupRef g = random_group();
      if (which == 0)
        f = Formula::common(g, f);
      else if (which == 1)
        f = Formula::common_a(g, f);
      else
        f = Formula::common_t(g, pick(0, m.stamp_count() - 1), f);
    }
  }
  return f;
}

}  // namespace beliefmc
