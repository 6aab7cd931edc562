// Command-line front end: load and validate models, check formulas, run the
// joint-behavior and equivalence analyses, and drive the built-in scenarios.
//
// Exit codes: 0 success / property holds; 1 usage, load, parse, or lookup
// error; 2 validation failure (or refusal to check an invalid model);
// 3 assertion failure (--assert, golden expectations, or a theorem-report
// mismatch).

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beliefmc/checker.hpp"
#include "beliefmc/formula.hpp"
#include "beliefmc/model.hpp"
#include "beliefmc/model_io.hpp"
#include "beliefmc/properties.hpp"
#include "beliefmc/reference.hpp"
#include "beliefmc/scenarios.hpp"

namespace {

using beliefmc::Model;
using beliefmc::Point;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalidModel = 2;
constexpr int kExitAssert = 3;

json point_json(const Model& m, Point p) {
  return json{{"run", m.run_name(p.run)}, {"time", p.time}};
}

json validation_json(const Model& m) {
  const auto& rep = m.validation();
  json viols = json::array();
  for (const auto& v : rep.violations)
    viols.push_back(
        {{"rule", v.rule}, {"element", v.element}, {"detail", v.detail}});
  (void)m;
  return json{{"passed", rep.passed}, {"violations", std::move(viols)}};
}

void print_validation(const Model& m) {
  const auto& rep = m.validation();
  if (rep.passed) {
    std::cout << "validation passed\n";
    return;
  }
  std::cout << "validation failed with " << rep.violations.size()
            << " violation(s):\n";
  for (const auto& v : rep.violations)
    std::cout << "  [" << v.rule << "] " << v.element << ": " << v.detail
              << "\n";
}

// Returns false (and prints) when the model is invalid and no override was
// given; commands then exit with kExitInvalidModel.
bool gate_validation(const Model& m, bool allow_invalid, bool as_json,
                     const char* command) {
  if (m.validation().passed) return true;
  if (allow_invalid) {
    std::cerr << "warning: model failed validation; continuing because "
                 "--allow-invalid was given\n";
    return true;
  }
  if (as_json) {
    json j{{"command", command},
           {"error", "model failed validation"},
           {"validation", validation_json(m)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cerr << "error: model failed validation; re-run `validate` for the "
                 "report or pass --allow-invalid to proceed anyway\n";
  }
  return false;
}

Point parse_point(const Model& m, const std::string& text) {
  auto comma = text.rfind(',');
  if (comma == std::string::npos)
    throw beliefmc::LookupError("point must be of the form run,time");
  int r = m.run_index(text.substr(0, comma));
  if (r < 0)
    throw beliefmc::LookupError("unknown run \"" + text.substr(0, comma) +
                                "\"");
  Point p{r, std::stoi(text.substr(comma + 1))};
  if (!m.valid_point(p))
    throw beliefmc::LookupError("point " + text + " is outside the run");
  return p;
}

json theorem_json(const Model& m, const beliefmc::TheoremReport& rep,
                  const std::string& group) {
  json j{{"theorem", rep.theorem},
         {"group", group},
         {"left", rep.left},
         {"right", rep.right},
         {"equivalence_respected", rep.equivalence_respected},
         {"message", rep.message}};
  j["witness"] = rep.witness ? point_json(m, *rep.witness) : json(nullptr);
  return j;
}

void print_theorem(const Model& m, const beliefmc::TheoremReport& rep,
                   const std::string& group) {
  std::cout << "theorem pair " << (rep.theorem == 12 ? "1-2" : "3-4")
            << " on group " << group << ": left="
            << (rep.left ? "true" : "false")
            << " right=" << (rep.right ? "true" : "false") << " -> "
            << (rep.equivalence_respected ? "equivalence respected"
                                          : "MISMATCH");
  if (rep.witness)
    std::cout << " (witness " << beliefmc::point_label(m, *rep.witness)
              << ")";
  std::cout << "\n  " << rep.message << "\n";
}

struct CommonArgs {
  std::string model_path;
  bool as_json = false;
  bool allow_invalid = false;
  bool do_assert = false;
};

int cmd_validate(const CommonArgs& args) {
  Model m = beliefmc::load_model_file(args.model_path);
  if (args.as_json) {
    json j{{"command", "validate"}, {"model", args.model_path}};
    j.update(validation_json(m));
    std::cout << j.dump(2) << "\n";
  } else {
    print_validation(m);
  }
  return m.validation().passed ? kExitOk : kExitInvalidModel;
}

int cmd_check(const CommonArgs& args, const std::string& formula_text,
              const std::string& point_text) {
  Model m = beliefmc::load_model_file(args.model_path);
  if (!gate_validation(m, args.allow_invalid, args.as_json, "check"))
    return kExitInvalidModel;

  beliefmc::Formula f = beliefmc::parse(formula_text, m);
  std::vector<Point> points;
  if (point_text.empty()) {
    for (int p = 0; p < m.point_count(); ++p) points.push_back(m.point_at(p));
  } else {
    points.push_back(parse_point(m, point_text));
  }

  beliefmc::EvalOptions opts;
  opts.skip_validation_check = true;  // gated above
  beliefmc::Evaluator ev(m, opts);
  bool all = true;
  json rows = json::array();
  for (Point p : points) {
    bool holds = ev.check(f, p);
    all = all && holds;
    if (args.as_json) {
      json row = point_json(m, p);
      row["holds"] = holds;
      rows.push_back(std::move(row));
    } else {
      std::cout << beliefmc::point_label(m, p) << "  "
                << (holds ? "true" : "false") << "\n";
    }
  }
  if (args.as_json) {
    json j{{"command", "check"},
           {"model", args.model_path},
           {"formula", beliefmc::render(f, m)},
           {"points", std::move(rows)},
           {"holds_everywhere", all}};
    std::cout << j.dump(2) << "\n";
  }
  return (args.do_assert && !all) ? kExitAssert : kExitOk;
}

int cmd_jb(const CommonArgs& args, const std::string& group) {
  Model m = beliefmc::load_model_file(args.model_path);
  if (!gate_validation(m, args.allow_invalid, args.as_json, "jb"))
    return kExitInvalidModel;

  int g = beliefmc::resolve_group(m, group);
  beliefmc::JbReport rep = beliefmc::check_jb(m, g);
  if (args.as_json) {
    json viols = json::array();
    for (const auto& [p, a] : rep.violations) {
      json row = point_json(m, p);
      row["agent"] = m.agent_name(a);
      viols.push_back(std::move(row));
    }
    json j{{"command", "jb"},
           {"model", args.model_path},
           {"group", group},
           {"holds", rep.holds},
           {"violations", std::move(viols)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "joint behavior for " << group << ": "
              << (rep.holds ? "holds" : "fails") << "\n";
    for (const auto& [p, a] : rep.violations)
      std::cout << "  " << m.agent_name(a) << " acts at "
                << beliefmc::point_label(m, p)
                << " without believing the group plan is carried out\n";
  }
  return (args.do_assert && !rep.holds) ? kExitAssert : kExitOk;
}

int run_theorems_on_model(const Model& m, const std::string& label,
                          const std::vector<std::string>& groups,
                          const std::optional<std::string>& phi_text,
                          const CommonArgs& args, json& out_reports,
                          bool& all_ok) {
  for (const std::string& gname : groups) {
    int g = beliefmc::resolve_group(m, gname);
    beliefmc::TheoremReport r12 = beliefmc::verify_theorem_1_2(m, g);
    all_ok = all_ok && r12.equivalence_respected;
    if (args.as_json) {
      json j = theorem_json(m, r12, gname);
      j["model"] = label;
      out_reports.push_back(std::move(j));
    } else {
      print_theorem(m, r12, gname);
    }
    if (phi_text) {
      beliefmc::Formula phi = beliefmc::parse(*phi_text, m);
      beliefmc::TheoremReport r34 = beliefmc::verify_theorem_3_4(m, g, phi);
      all_ok = all_ok && r34.equivalence_respected;
      if (args.as_json) {
        json j = theorem_json(m, r34, gname);
        j["model"] = label;
        j["phi"] = beliefmc::render(phi, m);
        out_reports.push_back(std::move(j));
      } else {
        print_theorem(m, r34, gname);
      }
    }
  }
  return kExitOk;
}

int cmd_theorems(const CommonArgs& args, const std::string& group,
                 const std::optional<std::string>& phi_text, int random_n,
                 uint64_t seed) {
  bool all_ok = true;
  json reports = json::array();

  if (random_n > 0) {
    // Generated corpus: run both built-in groups of every model, theorem
    // pair 1-2 plus 3-4 with a generated formula.  Results are collected
    // in seed order so the output is deterministic under parallelism.
    struct RowSet {
      std::vector<std::pair<beliefmc::TheoremReport, std::string>> rows;
      std::string label;
      bool ok = true;
    };
    std::vector<RowSet> per_model(random_n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < random_n; ++i) {
      Model m = beliefmc::random_model(seed + i);
      std::mt19937_64 rng(seed * 7919 + i);
      RowSet& slot = per_model[i];
      slot.label = "seed " + std::to_string(seed + i);
      for (int g = 0; g < m.group_count(); ++g) {
        beliefmc::TheoremReport r12 = beliefmc::verify_theorem_1_2(m, g);
        slot.ok = slot.ok && r12.equivalence_respected;
        slot.rows.emplace_back(std::move(r12), m.group_name(g));
        beliefmc::RandomFormulaParams fp;
        fp.max_depth = 3;
        fp.max_common_depth = 1;
        beliefmc::Formula phi = beliefmc::random_formula(rng, m, fp);
        beliefmc::TheoremReport r34 =
            beliefmc::verify_theorem_3_4(m, g, phi);
        slot.ok = slot.ok && r34.equivalence_respected;
        slot.rows.emplace_back(std::move(r34), m.group_name(g));
      }
    }
    int mismatches = 0;
    for (const RowSet& slot : per_model) {
      if (!slot.ok) ++mismatches;
      all_ok = all_ok && slot.ok;
      if (args.as_json) {
        for (const auto& [rep, gname] : slot.rows) {
          // Witness points reference a model we do not print; report the
          // label instead of coordinates to keep the output self-contained.
          json j{{"theorem", rep.theorem},
                 {"group", gname},
                 {"model", slot.label},
                 {"left", rep.left},
                 {"right", rep.right},
                 {"equivalence_respected", rep.equivalence_respected},
                 {"message", rep.message}};
          reports.push_back(std::move(j));
        }
      }
    }
    if (!args.as_json) {
      std::cout << "ran theorem pairs 1-2 and 3-4 on " << random_n
                << " generated models (2 groups each): "
                << (all_ok ? "all equivalences respected"
                           : std::to_string(mismatches) +
                                 " model(s) with mismatches")
                << "\n";
    }
  } else {
    Model m = beliefmc::load_model_file(args.model_path);
    if (!gate_validation(m, args.allow_invalid, args.as_json, "theorems"))
      return kExitInvalidModel;
    std::vector<std::string> groups;
    if (!group.empty()) {
      groups.push_back(group);
    } else {
      for (int g = 0; g < m.group_count(); ++g)
        groups.push_back(m.group_name(g));
      if (groups.empty()) {
        std::cerr << "error: the model declares no groups\n";
        return kExitUsage;
      }
    }
    run_theorems_on_model(m, args.model_path, groups, phi_text, args,
                          reports, all_ok);
  }

  if (args.as_json) {
    json j{{"command", "theorems"},
           {"reports", std::move(reports)},
           {"all_respected", all_ok}};
    std::cout << j.dump(2) << "\n";
  }
  return all_ok ? kExitOk : kExitAssert;
}

int cmd_scenario(const std::string& name, const std::string& export_path,
                 bool use_reference, bool as_json) {
  beliefmc::Scenario s = beliefmc::build_scenario(name);
  if (!export_path.empty()) {
    beliefmc::save_model_file(s.model, export_path);
    if (as_json) {
      json j{{"command", "scenario"},
             {"name", name},
             {"exported", export_path}};
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "wrote " << export_path << "\n";
    }
    return kExitOk;
  }

  auto outcomes = beliefmc::run_expectations(s, use_reference);
  bool all = true;
  json rows = json::array();
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const beliefmc::Expectation& e = s.expectations[i];
    const beliefmc::ExpectationOutcome& o = outcomes[i];
    all = all && o.passed;
    if (as_json) {
      json row{{"kind",
                e.kind == beliefmc::Expectation::FormulaHolds ? "formula"
                : e.kind == beliefmc::Expectation::Jb         ? "jb"
                                                              : "validate"},
               {"passed", o.passed},
               {"expected", e.expected},
               {"detail", o.detail},
               {"note", e.note}};
      if (!e.formula.empty()) row["formula"] = e.formula;
      if (!e.group.empty()) row["group"] = e.group;
      if (e.kind == beliefmc::Expectation::FormulaHolds)
        row["where"] = e.where;
      rows.push_back(std::move(row));
    } else {
      std::cout << (o.passed ? "PASS" : "FAIL") << "  " << o.detail << "\n";
      if (!o.passed) std::cout << "      note: " << e.note << "\n";
    }
  }
  if (as_json) {
    json j{{"command", "scenario"},
           {"name", name},
           {"title", s.title},
           {"results", std::move(rows)},
           {"all_passed", all}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << (all ? "all expectations hold" : "EXPECTATION FAILURES")
              << " for scenario " << name << "\n";
  }
  return all ? kExitOk : kExitAssert;
}

int cmd_export(const std::string& in_path, const std::string& out_path,
               bool as_json) {
  Model m = beliefmc::load_model_file(in_path);
  beliefmc::save_model_file(m, out_path);
  if (as_json) {
    json j{{"command", "export"}, {"model", in_path}, {"out", out_path}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_random(uint64_t seed, const std::string& out_path, bool as_json) {
  Model m = beliefmc::random_model(seed);
  if (out_path.empty()) {
    std::cout << beliefmc::model_to_json(m).dump(2) << "\n";
  } else {
    beliefmc::save_model_file(m, out_path);
    if (as_json) {
      json j{{"command", "random"},
             {"seed", seed},
             {"out", out_path},
             {"points", m.point_count()}};
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "wrote " << out_path << " (" << m.point_count()
                << " points)\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checker for multi-agent belief over finite runs"};
  app.require_subcommand(1);

  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable JSON output");

  CommonArgs validate_args;
  auto* validate = app.add_subcommand(
      "validate", "check a model file against the structural rules");
  validate->add_option("model", validate_args.model_path, "model JSON file")
      ->required();

  CommonArgs check_args;
  std::string check_formula, check_point;
  bool check_all = false;
  auto* check =
      app.add_subcommand("check", "evaluate a formula at model points");
  check->add_option("model", check_args.model_path, "model JSON file")
      ->required();
  check->add_option("-f,--formula", check_formula, "formula text")
      ->required();
  check->add_option("--point", check_point,
                    "single point run,time (default: all points)");
  check->add_flag("--all", check_all,
                  "evaluate at every point (the default)");
  check->add_flag("--assert", check_args.do_assert,
                  "exit 3 unless the formula holds at every selected point");
  check->add_flag("--allow-invalid", check_args.allow_invalid,
                  "evaluate even if validation fails");

  CommonArgs jb_args;
  std::string jb_group;
  auto* jb = app.add_subcommand(
      "jb", "check the joint-behavior property for a group");
  jb->add_option("model", jb_args.model_path, "model JSON file")->required();
  jb->add_option("--group", jb_group, "group name")->required();
  jb->add_flag("--assert", jb_args.do_assert,
               "exit 3 unless the property holds");
  jb->add_flag("--allow-invalid", jb_args.allow_invalid,
               "evaluate even if validation fails");

  CommonArgs thm_args;
  std::string thm_group;
  std::string thm_phi;
  int thm_random = 0;
  uint64_t thm_seed = 1;
  auto* thm = app.add_subcommand(
      "theorems",
      "verify the joint-behavior equivalences on a model or a random corpus");
  thm->add_option("model", thm_args.model_path, "model JSON file");
  thm->add_option("--group", thm_group,
                  "group name (default: every declared group)");
  thm->add_option("--phi", thm_phi,
                  "also run the arbitrary-formula pair with this formula");
  thm->add_option("--random", thm_random,
                  "run on N generated models instead of a file");
  thm->add_option("--seed", thm_seed, "seed for --random (default 1)");
  thm->add_flag("--allow-invalid", thm_args.allow_invalid,
                "evaluate even if validation fails");

  std::string scen_name, scen_export;
  bool scen_ref = false;
  auto* scen = app.add_subcommand(
      "scenario", "run or export one of the built-in scenarios");
  scen->add_option("name", scen_name,
                   "one of: generals1, generals2, firefighters, "
                   "searchrescue, bankrobbers")
      ->required();
  scen->add_option("--export", scen_export,
                   "write the scenario model to this file instead of "
                   "running it");
  scen->add_flag("--ref", scen_ref,
                 "evaluate expectations with the reference evaluator");

  std::string exp_in, exp_out;
  auto* exp = app.add_subcommand(
      "export", "reload a model file and write it back in canonical form");
  exp->add_option("model", exp_in, "model JSON file")->required();
  exp->add_option("out", exp_out, "output path")->required();

  uint64_t rnd_seed = 1;
  std::string rnd_out;
  auto* rnd = app.add_subcommand("random", "generate a random valid model");
  rnd->add_option("--seed", rnd_seed, "generator seed")->required();
  rnd->add_option("--out", rnd_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto& args : {&validate_args, &check_args, &jb_args, &thm_args})
      args->as_json = as_json;
    if (validate->parsed()) return cmd_validate(validate_args);
    if (check->parsed()) {
      if (!check_point.empty() && check_all) {
        std::cerr << "error: --point and --all are mutually exclusive\n";
        return kExitUsage;
      }
      return cmd_check(check_args, check_formula, check_point);
    }
    if (jb->parsed()) return cmd_jb(jb_args, jb_group);
    if (thm->parsed()) {
      if ((thm_random > 0) == !thm_args.model_path.empty()) {
        std::cerr << "error: pass either a model file or --random N, not "
                     "both and not neither\n";
        return kExitUsage;
      }
      std::optional<std::string> phi;
      if (!thm_phi.empty()) phi = thm_phi;
      return cmd_theorems(thm_args, thm_group, phi, thm_random, thm_seed);
    }
    if (scen->parsed())
      return cmd_scenario(scen_name, scen_export, scen_ref, as_json);
    if (exp->parsed()) return cmd_export(exp_in, exp_out, as_json);
    if (rnd->parsed()) return cmd_random(rnd_seed, rnd_out, as_json);
    std::cerr << "error: no subcommand\n";
    return kExitUsage;
  } catch (const beliefmc::ParseError& e) {
    std::cerr << "formula " << e.what() << "\n";
    return kExitUsage;
  } catch (const beliefmc::ResolveError& e) {
    std::cerr << "formula resolve error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const beliefmc::LoadError& e) {
    std::cerr << "model load error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const beliefmc::LookupError& e) {
    std::cerr << "lookup error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
