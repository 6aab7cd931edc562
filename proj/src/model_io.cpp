#include "beliefmc/model_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace beliefmc {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw LoadError(where + ": " + what);
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void expect_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
}

std::string expect_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

int expect_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key()))
      fail(where, "unknown key \"" + it.key() + "\"");
  }
}

// Point keys appear in two shapes: a two-element array [run, time] inside
// belief/flag lists, and a "run,time" string when used as an object key
// (JSON objects cannot have array keys).
std::pair<std::string, int> point_from_array(const json& j,
                                             const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    fail(where, "expected a [run, time] pair");
  std::string run = expect_string(j[0], where + "[0]");
  int t = expect_int(j[1], where + "[1]");
  return {run, t};
}

std::pair<std::string, int> point_from_key(const std::string& key,
                                           const std::string& where) {
  auto comma = key.rfind(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == key.size())
    fail(where, "point key \"" + key + "\" is not of the form \"run,time\"");
  std::string run = key.substr(0, comma);
  int t = 0;
  const char* b = key.data() + comma + 1;
  const char* e = key.data() + key.size();
  auto [p, ec] = std::from_chars(b, e, t);
  if (ec != std::errc() || p != e)
    fail(where, "point key \"" + key + "\" has a malformed time index");
  return {run, t};
}

int expect_time_key(const std::string& key, const std::string& where) {
  int t = 0;
  auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), t);
  if (ec != std::errc() || p != key.data() + key.size() || t < 0)
    fail(where, "time key \"" + key + "\" is not a non-negative integer");
  return t;
}

std::string point_key(const Model& m, int run, int time) {
  return m.run_name(run) + "," + std::to_string(time);
}

void load_flags(ModelBuilder& b, const json& j, const std::string& where,
                bool acting) {
  expect_object(j, where);
  for (auto git = j.begin(); git != j.end(); ++git) {
    const std::string gw = where + "." + git.key();
    expect_object(git.value(), gw);
    for (auto ait = git.value().begin(); ait != git.value().end(); ++ait) {
      const std::string aw = gw + "." + ait.key();
      expect_array(ait.value(), aw);
      for (const auto& pt : ait.value()) {
        auto [run, t] = point_from_array(pt, aw);
        if (acting)
          b.acting(git.key(), ait.key(), run, t);
        else
          b.should(git.key(), ait.key(), run, t);
      }
    }
  }
}

}  // namespace

Model model_from_json(const json& j) {
  expect_object(j, "model");
  reject_unknown_keys(j,
                      {"agents", "variables", "runs", "beliefs", "groups",
                       "timestamps", "acting", "should_act"},
                      "model");
  if (!j.contains("agents")) fail("model", "missing key \"agents\"");
  if (!j.contains("runs")) fail("model", "missing key \"runs\"");

  ModelBuilder b;

  expect_array(j["agents"], "agents");
  for (const auto& a : j["agents"])
    b.agent(expect_string(a, "agents[]"));

  if (j.contains("variables")) {
    expect_object(j["variables"], "variables");
    for (auto it = j["variables"].begin(); it != j["variables"].end(); ++it) {
      const std::string vw = "variables." + it.key();
      expect_array(it.value(), vw);
      std::vector<std::string> domain;
      for (const auto& v : it.value())
        domain.push_back(expect_string(v, vw + "[]"));
      b.variable(it.key(), domain);
    }
  }

  expect_object(j["runs"], "runs");
  for (auto rit = j["runs"].begin(); rit != j["runs"].end(); ++rit) {
    const std::string rw = "runs." + rit.key();
    expect_object(rit.value(), rw);
    reject_unknown_keys(rit.value(), {"horizon", "valuation"}, rw);
    if (!rit.value().contains("horizon"))
      fail(rw, "missing key \"horizon\"");
    b.run(rit.key(), expect_int(rit.value()["horizon"], rw + ".horizon"));
    if (rit.value().contains("valuation")) {
      const json& val = rit.value()["valuation"];
      expect_object(val, rw + ".valuation");
      for (auto tit = val.begin(); tit != val.end(); ++tit) {
        const std::string tw = rw + ".valuation." + tit.key();
        int t = expect_time_key(tit.key(), tw);
        expect_object(tit.value(), tw);
        for (auto vit = tit.value().begin(); vit != tit.value().end(); ++vit)
          b.value(rit.key(), t, vit.key(),
                  expect_string(vit.value(), tw + "." + vit.key()));
      }
    }
  }

  if (j.contains("beliefs")) {
    expect_object(j["beliefs"], "beliefs");
    for (auto ait = j["beliefs"].begin(); ait != j["beliefs"].end(); ++ait) {
      const std::string aw = "beliefs." + ait.key();
      expect_array(ait.value(), aw);
      for (const auto& edge : ait.value()) {
        if (!edge.is_array() || edge.size() != 2)
          fail(aw, "expected an edge of the form [[run,t],[run,t]]");
        auto [r1, t1] = point_from_array(edge[0], aw + "[0]");
        auto [r2, t2] = point_from_array(edge[1], aw + "[1]");
        b.belief(ait.key(), r1, t1, r2, t2);
      }
    }
  }

  if (j.contains("groups")) {
    expect_object(j["groups"], "groups");
    for (auto git = j["groups"].begin(); git != j["groups"].end(); ++git) {
      const std::string gw = "groups." + git.key();
      expect_object(git.value(), gw);
      if (git.value().contains("rigid")) {
        reject_unknown_keys(git.value(), {"rigid"}, gw);
        const json& mem = git.value()["rigid"];
        expect_array(mem, gw + ".rigid");
        std::vector<std::string> agents;
        for (const auto& a : mem)
          agents.push_back(expect_string(a, gw + ".rigid[]"));
        b.rigid_group(git.key(), agents);
      } else {
        b.group(git.key());
        for (auto pit = git.value().begin(); pit != git.value().end(); ++pit) {
          const std::string pw = gw + "." + pit.key();
          auto [run, t] = point_from_key(pit.key(), pw);
          expect_array(pit.value(), pw);
          for (const auto& a : pit.value())
            b.member(git.key(), run, t, expect_string(a, pw + "[]"));
        }
      }
    }
  }

  if (j.contains("timestamps")) {
    expect_object(j["timestamps"], "timestamps");
    for (auto sit = j["timestamps"].begin(); sit != j["timestamps"].end();
         ++sit) {
      const std::string sw = "timestamps." + sit.key();
      b.stamp(sit.key());
      expect_object(sit.value(), sw);
      for (auto ait = sit.value().begin(); ait != sit.value().end(); ++ait) {
        const std::string aw = sw + "." + ait.key();
        expect_object(ait.value(), aw);
        for (auto rit = ait.value().begin(); rit != ait.value().end(); ++rit)
          b.stamp_time(sit.key(), ait.key(), rit.key(),
                       expect_int(rit.value(), aw + "." + rit.key()));
      }
    }
  }

  if (j.contains("acting")) load_flags(b, j["acting"], "acting", true);
  if (j.contains("should_act"))
    load_flags(b, j["should_act"], "should_act", false);

  try {
    return b.build();
  } catch (const ModelError& e) {
    throw LoadError(std::string("model: ") + e.what());
  }
}

json model_to_json(const Model& m) {
  json j = json::object();

  j["agents"] = json::array();
  for (int a = 0; a < m.agent_count(); ++a)
    j["agents"].push_back(m.agent_name(a));

  if (m.variable_count() > 0) {
    json vars = json::object();
    for (int v = 0; v < m.variable_count(); ++v) {
      json dom = json::array();
      for (const auto& tok : m.domain(v)) dom.push_back(tok);
      vars[m.variable_name(v)] = std::move(dom);
    }
    j["variables"] = std::move(vars);
  }

  json runs = json::object();
  for (int r = 0; r < m.run_count(); ++r) {
    json rj = json::object();
    rj["horizon"] = m.horizon(r);
    json val = json::object();
    for (int t = 0; t < m.horizon(r); ++t) {
      json tv = json::object();
      int p = m.point_index(Point{r, t});
      for (int v = 0; v < m.variable_count(); ++v) {
        int raw = m.raw_value(p, v);
        if (raw >= 0) tv[m.variable_name(v)] = m.domain(v)[raw];
      }
      if (!tv.empty()) val[std::to_string(t)] = std::move(tv);
    }
    if (!val.empty()) rj["valuation"] = std::move(val);
    runs[m.run_name(r)] = std::move(rj);
  }
  j["runs"] = std::move(runs);

  json beliefs = json::object();
  for (int a = 0; a < m.agent_count(); ++a) {
    json edges = json::array();
    for (int p = 0; p < m.point_count(); ++p) {
      Point src = m.point_at(p);
      for (int q : m.successors(a, p)) {
        Point dst = m.point_at(q);
        edges.push_back(json::array(
            {json::array({m.run_name(src.run), src.time}),
             json::array({m.run_name(dst.run), dst.time})}));
      }
    }
    if (!edges.empty()) beliefs[m.agent_name(a)] = std::move(edges);
  }
  if (!beliefs.empty()) j["beliefs"] = std::move(beliefs);

  if (m.group_count() > 0) {
    json groups = json::object();
    for (int g = 0; g < m.group_count(); ++g) {
      json gj = json::object();
      if (m.group_is_rigid(g)) {
        json mem = json::array();
        uint64_t mask = m.membership_mask(g, 0);
        for (int a = 0; a < m.agent_count(); ++a)
          if (mask & (uint64_t{1} << a)) mem.push_back(m.agent_name(a));
        gj["rigid"] = std::move(mem);
      } else {
        for (int p = 0; p < m.point_count(); ++p) {
          uint64_t mask = m.membership_mask(g, p);
          if (!mask) continue;
          json mem = json::array();
          for (int a = 0; a < m.agent_count(); ++a)
            if (mask & (uint64_t{1} << a)) mem.push_back(m.agent_name(a));
          Point pt = m.point_at(p);
          gj[point_key(m, pt.run, pt.time)] = std::move(mem);
        }
      }
      groups[m.group_name(g)] = std::move(gj);
    }
    j["groups"] = std::move(groups);
  }

  if (m.stamp_count() > 0) {
    json stamps = json::object();
    for (int s = 0; s < m.stamp_count(); ++s) {
      json sj = json::object();
      for (int a = 0; a < m.agent_count(); ++a) {
        json aj = json::object();
        for (int r = 0; r < m.run_count(); ++r) {
          int t = m.stamp_time(s, a, r);
          if (t >= 0) aj[m.run_name(r)] = t;
        }
        if (!aj.empty()) sj[m.agent_name(a)] = std::move(aj);
      }
      stamps[m.stamp_name(s)] = std::move(sj);
    }
    j["timestamps"] = std::move(stamps);
  }

  auto dump_flags = [&](bool acting) {
    json out = json::object();
    for (int g = 0; g < m.group_count(); ++g) {
      json gj = json::object();
      for (int a = 0; a < m.agent_count(); ++a) {
        json pts = json::array();
        for (int p = 0; p < m.point_count(); ++p) {
          bool set = acting ? m.acting(g, a, p) : m.should_act(g, a, p);
          if (!set) continue;
          Point pt = m.point_at(p);
          pts.push_back(json::array({m.run_name(pt.run), pt.time}));
        }
        if (!pts.empty()) gj[m.agent_name(a)] = std::move(pts);
      }
      if (!gj.empty()) out[m.group_name(g)] = std::move(gj);
    }
    return out;
  };
  json acting = dump_flags(true);
  if (!acting.empty()) j["acting"] = std::move(acting);
  json should = dump_flags(false);
  if (!should.empty()) j["should_act"] = std::move(should);

  return j;
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError(path + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model_file(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot open " + path + " for writing");
  out << model_to_json(m).dump(2) << "\n";
}

}  // namespace beliefmc
