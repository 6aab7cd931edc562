#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "beliefmc/model_io.hpp"
#include "beliefmc/scenarios.hpp"

using namespace beliefmc;
using nlohmann::json;

namespace {

Model from_text(const std::string& text) {
  return model_from_json(json::parse(text));
}

}  // namespace

TEST_CASE("model JSON round-trips exactly for every built-in scenario") {
  for (const auto& name : scenario_names()) {
    Model m = build_scenario(name).model;
    json j = model_to_json(m);
    Model back = model_from_json(j);
    CHECK(model_to_json(back) == j);
  }
}

TEST_CASE("model JSON round-trips for generated models") {
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    Model m = random_model(seed);
    json j = model_to_json(m);
    CHECK(model_to_json(model_from_json(j)) == j);
  }
}

TEST_CASE("file save and load reproduce the model") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "beliefmc_io_roundtrip.json";
  Model m = build_scenario("firefighters").model;
  save_model_file(m, path.string());
  Model back = load_model_file(path.string());
  CHECK(model_to_json(back) == model_to_json(m));
  fs::remove(path);
  CHECK_THROWS_AS(load_model_file(path.string()), LoadError);
}

TEST_CASE("loader accepts a minimal document") {
  Model m = from_text(R"({
    "agents": ["a"],
    "runs": {"r": {"horizon": 1}},
    "beliefs": {"a": [[["r", 0], ["r", 0]]]}
  })");
  CHECK(m.agent_count() == 1);
  CHECK(m.point_count() == 1);
  CHECK(m.validated_ok());
}

TEST_CASE("loader rejects unknown keys at every level") {
  CHECK_THROWS_AS(from_text(R"({
    "agents": ["a"], "runs": {"r": {"horizon": 1}}, "extra": 1
  })"),
                  LoadError);
  CHECK_THROWS_AS(from_text(R"({
    "agents": ["a"], "runs": {"r": {"horizon": 1, "color": "red"}}
  })"),
                  LoadError);
  CHECK_THROWS_AS(from_text(R"({
    "agents": ["a"], "runs": {"r": {"horizon": 1}},
    "groups": {"g": {"rigid": ["a"], "note": "x"}}
  })"),
                  LoadError);
}

TEST_CASE("loader rejects missing required sections and bad shapes") {
  CHECK_THROWS_AS(from_text(R"({"runs": {"r": {"horizon": 1}}})"), LoadError);
  CHECK_THROWS_AS(from_text(R"({"agents": ["a"]})"), LoadError);
  CHECK_THROWS_AS(from_text(R"({"agents": "a", "runs": {}})"), LoadError);
  CHECK_THROWS_AS(from_text(R"({
    "agents": ["a"], "runs": {"r": {"horizon": "two"}}
  })"),
                  LoadError);
  CHECK_THROWS_AS(from_text(R"([1, 2])"), LoadError);
}

TEST_CASE("loader rejects a stamp entry holding a point instead of a time") {
  // Times are per (agent, run); a [run, time] pair in value position is a
  // different notion of stamp and must not slip through.
  CHECK_THROWS_AS(from_text(R"({
    "agents": ["a"],
    "runs": {"r": {"horizon": 2}},
    "beliefs": {"a": [[["r", 0], ["r", 0]], [["r", 1], ["r", 1]]]},
    "timestamps": {"clock": {"a": {"r": ["r", 1]}}}
  })"),
                  LoadError);
}

TEST_CASE("loader reports structural model faults as load errors") {
  // Belief edge to a time outside the horizon: caught at build.
  CHECK_THROWS_AS(from_text(R"({
    "agents": ["a"],
    "runs": {"r": {"horizon": 1}},
    "beliefs": {"a": [[["r", 0], ["r", 5]]]}
  })"),
                  LoadError);
  // Unknown agent in a group.
  CHECK_THROWS_AS(from_text(R"({
    "agents": ["a"],
    "runs": {"r": {"horizon": 1}},
    "groups": {"g": {"rigid": ["ghost"]}}
  })"),
                  LoadError);
}

TEST_CASE("saved form is canonical: reload and re-save is byte-stable") {
  Model m = random_model(99);
  json once = model_to_json(m);
  std::string dumped = once.dump(2);
  json twice = model_to_json(model_from_json(json::parse(dumped)));
  CHECK(twice.dump(2) == dumped);
}

TEST_CASE("an invalid model survives the round trip with its violations") {
  // Saving does not require validity; the reloaded model reports the same
  // violation set.
  Model m = from_text(R"({
    "agents": ["a"],
    "runs": {"r": {"horizon": 2}},
    "beliefs": {"a": [[["r", 0], ["r", 1]]]}
  })");
  REQUIRE_FALSE(m.validated_ok());
  Model back = model_from_json(model_to_json(m));
  REQUIRE_FALSE(back.validated_ok());
  CHECK(back.validation().violations.size() ==
        m.validation().violations.size());
}
