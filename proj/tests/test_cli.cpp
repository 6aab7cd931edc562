#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "beliefmc/model_io.hpp"
#include "beliefmc/scenarios.hpp"

// BELIEFMC_CLI is the path of the command-line binary, injected by the
// build so the suite drives the real executable.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path work_dir() {
  fs::path d = fs::temp_directory_path() / "beliefmc_cli_tests";
  fs::create_directories(d);
  return d;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = work_dir() / ("out" + std::to_string(counter) + ".txt");
  fs::path err = work_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string(BELIEFMC_CLI) + " " + args + " > " +
                    out.string() + " 2> " + err.string();
  int status = std::system(cmd.c_str());
  RunResult r;
#if defined(_WIN32)
  r.exit_code = status;
#else
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Scenario models written once for the whole suite.
fs::path scenario_file(const std::string& name) {
  fs::path p = work_dir() / (name + ".json");
  if (!fs::exists(p))
    beliefmc::save_model_file(beliefmc::build_scenario(name).model,
                              p.string());
  return p;
}

fs::path invalid_model_file() {
  fs::path p = work_dir() / "invalid.json";
  std::ofstream(p) << R"({
    "agents": ["a"],
    "runs": {"r": {"horizon": 2}},
    "beliefs": {"a": [[["r", 0], ["r", 1]]]}
  })";
  return p;
}

}  // namespace

TEST_CASE("cli: help and usage errors") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("check").exit_code == 1);  // missing model and formula
}

TEST_CASE("cli: validate reports and exit codes") {
  auto good = run_cli("validate " + scenario_file("generals1").string());
  CHECK(good.exit_code == 0);
  CHECK(good.out.find("validation passed") != std::string::npos);

  auto bad = run_cli("validate " + invalid_model_file().string());
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.find("serial") != std::string::npos);

  auto gone = run_cli("validate /no/such/file.json");
  CHECK(gone.exit_code == 1);
  CHECK(gone.err.find("load error") != std::string::npos);

  auto j = run_cli("--json validate " + invalid_model_file().string());
  CHECK(j.exit_code == 2);
  json parsed = json::parse(j.out);
  CHECK(parsed["command"] == "validate");
  CHECK(parsed["passed"] == false);
  CHECK(parsed["violations"].size() == 2);
  for (const auto& v : parsed["violations"]) {
    CHECK(v.contains("rule"));
    CHECK(v.contains("element"));
    CHECK(v.contains("detail"));
  }
}

TEST_CASE("cli: check evaluates formulas at selected points") {
  std::string model = scenario_file("generals1").string();
  auto one = run_cli("check " + model + " -f 'C[t:plan]{Y,Z}(PLAN=1)' --point rGo,0");
  CHECK(one.exit_code == 0);
  CHECK(one.out.find("rGo,0  true") != std::string::npos);

  auto all = run_cli("check " + model + " -f 'chi{YZ}'");
  CHECK(all.exit_code == 0);
  CHECK(all.out.find("rCapt,0  false") != std::string::npos);
  CHECK(all.out.find("rGo,0  true") != std::string::npos);

  auto conflict = run_cli("check " + model + " -f 'chi{YZ}' --point rGo,0 --all");
  CHECK(conflict.exit_code == 1);

  auto asserted = run_cli("check " + model + " -f 'C{Y,Z}(PLAN=1)' --point rGo,0 --assert");
  CHECK(asserted.exit_code == 3);
  auto ok = run_cli("check " + model + " -f 'C[t:plan]{Y,Z}(PLAN=1)' --point rGo,0 --assert");
  CHECK(ok.exit_code == 0);

  auto badformula = run_cli("check " + model + " -f 'C{Y,'");
  CHECK(badformula.exit_code == 1);
  CHECK(badformula.err.find("parse error") != std::string::npos);

  auto badname = run_cli("check " + model + " -f 'GHOST=1'");
  CHECK(badname.exit_code == 1);
  CHECK(badname.err.find("GHOST") != std::string::npos);

  auto badpoint = run_cli("check " + model + " -f 'chi{YZ}' --point rGo,99");
  CHECK(badpoint.exit_code == 1);

  auto j = run_cli("--json check " + model + " -f 'chi{YZ}' --point rCapt,0");
  json parsed = json::parse(j.out);
  CHECK(parsed["command"] == "check");
  CHECK(parsed["formula"] == "chi{YZ}");
  CHECK(parsed["holds_everywhere"] == false);
  REQUIRE(parsed["points"].size() == 1);
  CHECK(parsed["points"][0]["run"] == "rCapt");
  CHECK(parsed["points"][0]["holds"] == false);
}

TEST_CASE("cli: invalid models are refused unless overridden") {
  std::string bad = invalid_model_file().string();
  auto refused = run_cli("check " + bad + " -f 'MEMBER_a_g=1'");
  CHECK(refused.exit_code == 2);

  // With the override the formula still mentions an unknown group.
  auto forced = run_cli("check " + bad + " -f 'MEMBER_a_g=1' --allow-invalid");
  CHECK(forced.exit_code == 1);

  // The refusal stays machine-readable in JSON mode.
  auto j = run_cli("--json check " + bad + " -f 'MEMBER_a_g=1'");
  CHECK(j.exit_code == 2);
  json parsed = json::parse(j.out);
  CHECK(parsed["error"] == "model failed validation");
  CHECK(parsed["validation"]["passed"] == false);
}

TEST_CASE("cli: jb subcommand") {
  auto holds = run_cli("jb " + scenario_file("generals1").string() + " --group YZ");
  CHECK(holds.exit_code == 0);
  CHECK(holds.out.find("holds") != std::string::npos);

  auto fails = run_cli("jb " + scenario_file("bankrobbers").string() + " --group heist");
  CHECK(fails.exit_code == 0);  // reporting, not asserting
  CHECK(fails.out.find("fails") != std::string::npos);

  auto asserted = run_cli("jb " + scenario_file("bankrobbers").string() +
                          " --group heist --assert");
  CHECK(asserted.exit_code == 3);

  auto unknown = run_cli("jb " + scenario_file("bankrobbers").string() + " --group nope");
  CHECK(unknown.exit_code == 1);

  auto j = run_cli("--json jb " + scenario_file("bankrobbers").string() + " --group heist");
  json parsed = json::parse(j.out);
  CHECK(parsed["holds"] == false);
  CHECK(parsed["violations"].size() == 2);
  for (const auto& v : parsed["violations"]) {
    CHECK(v.contains("run"));
    CHECK(v.contains("time"));
    CHECK(v.contains("agent"));
  }
}

TEST_CASE("cli: theorems on a model file and on a random corpus") {
  auto file = run_cli("theorems " + scenario_file("generals2").string());
  CHECK(file.exit_code == 0);
  CHECK(file.out.find("equivalence respected") != std::string::npos);

  auto rnd = run_cli("theorems --random 25 --seed 7");
  CHECK(rnd.exit_code == 0);
  CHECK(rnd.out.find("all equivalences respected") != std::string::npos);

  auto both = run_cli("theorems " + scenario_file("generals2").string() + " --random 5");
  CHECK(both.exit_code == 1);
  auto neither = run_cli("theorems");
  CHECK(neither.exit_code == 1);

  auto j = run_cli("--json theorems --random 5 --seed 3");
  json parsed = json::parse(j.out);
  CHECK(parsed["all_respected"] == true);
  CHECK(parsed["reports"].size() == 5 * 2 * 2);  // two groups, two pairs
  for (const auto& r : parsed["reports"]) {
    CHECK(r.contains("theorem"));
    CHECK(r.contains("left"));
    CHECK(r.contains("right"));
    CHECK(r.contains("equivalence_respected"));
  }

  auto with_phi = run_cli("theorems " + scenario_file("generals2").string() +
                          " --group YZ --phi 'PLAN=1'");
  CHECK(with_phi.exit_code == 0);
}

TEST_CASE("cli: scenario listing, runs and export reproduce results") {
  for (const auto& name : beliefmc::scenario_names()) {
    auto r = run_cli("scenario " + name);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    auto ref = run_cli("scenario " + name + " --ref");
    CHECK(ref.exit_code == 0);
  }
  CHECK(run_cli("scenario nope").exit_code == 1);

  fs::path exported = work_dir() / "exported_g1.json";
  auto ex = run_cli("scenario generals1 --export " + exported.string());
  CHECK(ex.exit_code == 0);
  REQUIRE(fs::exists(exported));

  // The exported file answers exactly like the built-in model.
  auto t = run_cli("check " + exported.string() +
                   " -f 'C[t:plan]{Y,Z}(PLAN=1)' --point rGo,0 --assert");
  CHECK(t.exit_code == 0);
  auto f = run_cli("check " + exported.string() +
                   " -f 'C{Y,Z}(PLAN=1)' --point rGo,0 --assert");
  CHECK(f.exit_code == 3);

  auto j = run_cli("--json scenario bankrobbers");
  json parsed = json::parse(j.out);
  CHECK(parsed["all_passed"] == true);
  for (const auto& res : parsed["results"]) CHECK(res["passed"] == true);
}

TEST_CASE("cli: export canonicalizes and random generation is stable") {
  fs::path once = work_dir() / "canon1.json";
  fs::path twice = work_dir() / "canon2.json";
  auto e1 = run_cli("export " + scenario_file("firefighters").string() + " " +
                    once.string());
  CHECK(e1.exit_code == 0);
  auto e2 = run_cli("export " + once.string() + " " + twice.string());
  CHECK(e2.exit_code == 0);
  CHECK(slurp(once) == slurp(twice));

  fs::path r1 = work_dir() / "rand1.json";
  fs::path r2 = work_dir() / "rand2.json";
  CHECK(run_cli("random --seed 12 --out " + r1.string()).exit_code == 0);
  CHECK(run_cli("random --seed 12 --out " + r2.string()).exit_code == 0);
  CHECK(slurp(r1) == slurp(r2));
  CHECK(run_cli("validate " + r1.string()).exit_code == 0);

  auto stdout_model = run_cli("random --seed 4");
  CHECK(stdout_model.exit_code == 0);
  CHECK(json::parse(stdout_model.out).contains("agents"));
}
