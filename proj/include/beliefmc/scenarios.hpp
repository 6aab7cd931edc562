#pragma once

#include <random>
#include <string>
#include <vector>

#include "beliefmc/model.hpp"
#include "beliefmc/formula.hpp"

namespace beliefmc {

// A declared expected outcome of running the checker on a scenario model.
// `where` selects points: "all", a run id, or a single "run,time" point.
struct Expectation {
  enum Kind { FormulaHolds, Jb, ValidatePasses };
  Kind kind = FormulaHolds;
  std::string formula;         // FormulaHolds: concrete syntax
  std::string group;           // Jb: group name
  std::string where = "all";   // point selector
  bool expected = true;
  int expected_violations = -1;  // Jb: exact violation count when >= 0
  std::string note;              // story-level rationale
};

struct Scenario {
  std::string name;
  std::string title;
  Model model;
  std::vector<Expectation> expectations;
};

struct ExpectationOutcome {
  bool passed = false;
  std::string detail;
};

// Evaluate every expectation; use_reference switches formula checks to the
// chain-expansion reference evaluator for cross-validation.
std::vector<ExpectationOutcome> run_expectations(const Scenario& s,
                                                 bool use_reference = false);

// Points selected by an Expectation::where value.
std::vector<Point> expectation_points(const Model& m,
                                      const std::string& where);

std::vector<std::string> scenario_names();
Scenario build_scenario(const std::string& name);

Scenario build_generals_timestamped();    // "generals1"
Scenario build_generals_actionstamped();  // "generals2"
Scenario build_firefighters_indexical();  // "firefighters"
Scenario build_search_rescue();           // "searchrescue"
Scenario build_bank_robbers();            // "bankrobbers"

struct RandomModelParams {
  int min_runs = 2, max_runs = 4;
  int min_horizon = 2, max_horizon = 5;
  int min_agents = 2, max_agents = 3;
  double flag_density = 0.2;
  int max_points = 64;
};

// Deterministic in seed; always validates (belief edges are repaired to
// KD45 by closing each relation into clusters, then re-checked by the
// regular validator rather than trusted).  Declares two variables, a rigid
// group g0, an indexical group g1, and a total time stamp "sync".
Model random_model(uint64_t seed, const RandomModelParams& params = {});

struct RandomFormulaParams {
  int max_depth = 4;
  bool require_common = false;  // guarantee at least one C-variant node
  int max_common_depth = 2;     // C-variants only while depth <= this
  bool allow_flags = true;
};

Formula random_formula(std::mt19937_64& rng, const Model& m,
                       const RandomFormulaParams& params = {});

}  // namespace beliefmc
