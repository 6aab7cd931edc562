#include "beliefmc/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace beliefmc {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

bool is_value_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::string point_label(const Model& m, Point p) {
  return m.run_name(p.run) + "," + std::to_string(p.time);
}

std::string point_label(const Model& m, int point) { return point_label(m, m.point_at(point)); }

namespace {

template <typename Vec>
int find_name(const Vec& names, std::string_view name) {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

// Splits a "<PREFIX>_<agent>_<group>" derived-variable name.  Agent and
// group names may themselves contain underscores, so every split position
// is tried; more than one resolving split is an error the caller reports.
std::vector<std::pair<int, int>> flag_splits(const Model& m, std::string_view rest) {
  std::vector<std::pair<int, int>> out;
  for (size_t i = 1; i + 1 < rest.size(); ++i) {
    if (rest[i] != '_') continue;
    int a = m.agent_index(rest.substr(0, i));
    int g = m.group_index(rest.substr(i + 1));
    if (a >= 0 && g >= 0) out.emplace_back(a, g);
  }
  return out;
}

}  // namespace

int Model::agent_index(std::string_view name) const { return find_name(agents_, name); }

int Model::agent_index_checked(std::string_view name) const {
  int i = agent_index(name);
  if (i < 0) throw LookupError("unknown agent '" + std::string(name) + "'");
  return i;
}

int Model::variable_index(std::string_view name) const { return find_name(variables_, name); }

int Model::value_index(int var, std::string_view value) const {
  return find_name(domains_.at(var), value);
}

int Model::run_index(std::string_view name) const { return find_name(run_names_, name); }

int Model::group_index(std::string_view name) const { return find_name(group_names_, name); }

int Model::stamp_index(std::string_view name) const { return find_name(stamp_names_, name); }

int Model::point_index_checked(Point p) const {
  if (!valid_point(p)) {
    std::ostringstream os;
    os << "invalid point (";
    if (p.run >= 0 && p.run < run_count())
      os << run_names_[p.run];
    else
      os << "run#" << p.run;
    os << "," << p.time << ")";
    throw LookupError(os.str());
  }
  return point_index(p);
}

Point Model::point_at(int idx) const {
  int r = point_run_.at(idx);
  return Point{r, idx - run_offset_[r]};
}

std::optional<VarRef> Model::resolve_variable(std::string_view name) const {
  int v = variable_index(name);
  if (v >= 0) return VarRef{v};
  FlagRef::Kind kind;
  std::string_view rest;
  if (name.starts_with("ACTING_")) {
    kind = FlagRef::Acting;
    rest = name.substr(7);
  } else if (name.starts_with("SHOULD_ACT_")) {
    kind = FlagRef::ShouldAct;
    rest = name.substr(11);
  } else if (name.starts_with("MEMBER_")) {
    kind = FlagRef::Member;
    rest = name.substr(7);
  } else {
    return std::nullopt;
  }
  auto splits = flag_splits(*this, rest);
  if (splits.empty()) return std::nullopt;
  if (splits.size() > 1) {
    std::ostringstream os;
    os << "ambiguous flag variable '" << name << "': matches";
    for (auto [a, g] : splits) os << " (agent " << agents_[a] << ", group " << group_names_[g] << ")";
    throw LookupError(os.str());
  }
  return VarRef{FlagRef{kind, splits[0].first, splits[0].second}};
}

std::string Model::value_at(Point p, std::string_view var_name) const {
  int idx = point_index_checked(p);
  auto ref = resolve_variable(var_name);
  if (!ref) throw LookupError("unknown variable '" + std::string(var_name) + "'");
  if (std::holds_alternative<int>(*ref)) {
    int v = std::get<int>(*ref);
    int val = raw_value(idx, v);
    if (val < 0)
      throw LookupError("valuation gap for variable '" + std::string(var_name) + "' at (" +
                        point_label(*this, p) + ")");
    return domains_[v][val];
  }
  const FlagRef& f = std::get<FlagRef>(*ref);
  bool bit = false;
  switch (f.kind) {
    case FlagRef::Acting: bit = acting(f.group, f.agent, idx); break;
    case FlagRef::ShouldAct: bit = should_act(f.group, f.agent, idx); break;
    case FlagRef::Member: bit = is_member(f.group, idx, f.agent); break;
  }
  return bit ? "1" : "0";
}

std::span<const int> Model::successors(int agent, int point) const {
  const auto& v = succ_.at(agent).at(point);
  return {v.data(), v.size()};
}

std::vector<Point> Model::successors(std::string_view agent, Point p) const {
  int a = agent_index_checked(agent);
  int idx = point_index_checked(p);
  std::vector<Point> out;
  for (int q : succ_[a][idx]) out.push_back(point_at(q));
  return out;
}

std::vector<std::string> Model::membership(std::string_view group, Point p) const {
  int g = group_index(group);
  if (g < 0) throw LookupError("unknown group '" + std::string(group) + "'");
  int idx = point_index_checked(p);
  std::vector<std::string> out;
  uint64_t mask = members_[g][idx];
  for (int a = 0; a < agent_count(); ++a)
    if ((mask >> a) & 1u) out.push_back(agents_[a]);
  return out;
}

void Model::check_kd45(ValidationReport& rep) const {
  for (int a = 0; a < agent_count(); ++a) {
    const auto& rel = succ_[a];
    for (int p = 0; p < total_points_; ++p) {
      if (rel[p].empty())
        rep.violations.push_back({"serial", "agent " + agents_[a] + " at (" + point_label(*this, p) + ")",
                                  "point has no belief successor"});
    }
    auto has_edge = [&](int from, int to) {
      return std::binary_search(rel[from].begin(), rel[from].end(), to);
    };
    for (int p = 0; p < total_points_; ++p) {
      for (int q : rel[p]) {
        // transitivity: p->q and q->s require p->s
        for (int s : rel[q]) {
          if (!has_edge(p, s))
            rep.violations.push_back(
                {"transitive",
                 "agent " + agents_[a] + " witness ((" + point_label(*this, p) + "),(" +
                     point_label(*this, q) + "),(" + point_label(*this, s) + "))",
                 "missing edge (" + point_label(*this, p) + ") -> (" + point_label(*this, s) + ")"});
        }
        // Euclidean-ness: p->q and p->s require q->s
        for (int s : rel[p]) {
          if (!has_edge(q, s))
            rep.violations.push_back(
                {"euclidean",
                 "agent " + agents_[a] + " witness ((" + point_label(*this, p) + "),(" +
                     point_label(*this, q) + "),(" + point_label(*this, s) + "))",
                 "missing edge (" + point_label(*this, q) + ") -> (" + point_label(*this, s) + ")"});
        }
      }
    }
  }
}

const ValidationReport& Model::validation() const {
  if (validation_cache_) return *validation_cache_;
  ValidationReport rep;
  // Belief relation shape.
  check_kd45(rep);
  // Time-stamp totality and range.
  for (int s = 0; s < stamp_count(); ++s) {
    for (int a = 0; a < agent_count(); ++a) {
      for (int r = 0; r < run_count(); ++r) {
        int t = stamps_[s][a * run_count() + r];
        if (t < 0)
          rep.violations.push_back({"timestamp",
                                    "stamp " + stamp_names_[s] + " agent " + agents_[a] + " run " +
                                        run_names_[r],
                                    "no time declared"});
        else if (t >= horizons_[r])
          rep.violations.push_back({"timestamp",
                                    "stamp " + stamp_names_[s] + " agent " + agents_[a] + " run " +
                                        run_names_[r],
                                    "time " + std::to_string(t) + " outside horizon " +
                                        std::to_string(horizons_[r])});
      }
    }
  }
  // Valuation totality.
  for (int p = 0; p < total_points_; ++p) {
    for (int v = 0; v < variable_count(); ++v) {
      if (vals_[p * variable_count() + v] < 0)
        rep.violations.push_back({"valuation",
                                  "variable " + variables_[v] + " at (" + point_label(*this, p) + ")",
                                  "no value declared"});
    }
  }
  // Defensive reference scan (builder-constructed models cannot trip these,
  // but the rule is part of the report contract).
  for (int a = 0; a < agent_count(); ++a)
    for (int p = 0; p < total_points_; ++p)
      for (int q : succ_[a][p])
        if (q < 0 || q >= total_points_)
          rep.violations.push_back({"reference", "agent " + agents_[a], "belief edge endpoint out of range"});
  rep.passed = rep.violations.empty();
  validation_cache_ = std::move(rep);
  return *validation_cache_;
}

Model Model::with_acting_flags(int group, const std::vector<uint64_t>& acting_by_point) const {
  if (group < 0 || group >= group_count()) throw LookupError("group index out of range");
  if (static_cast<int>(acting_by_point.size()) != total_points_)
    throw LookupError("acting flag vector size mismatch");
  Model m = *this;
  m.acting_[group] = acting_by_point;
  m.validation_cache_.reset();
  return m;
}

// ---------------------------------------------------------------------------
// ModelBuilder

ModelBuilder& ModelBuilder::agent(std::string name) {
  agents_.push_back(std::move(name));
  return *this;
}

ModelBuilder& ModelBuilder::variable(std::string name, std::vector<std::string> domain) {
  variables_.emplace_back(std::move(name), std::move(domain));
  return *this;
}

ModelBuilder& ModelBuilder::run(std::string name, int horizon) {
  runs_.push_back(RunDecl{std::move(name), horizon, {}});
  return *this;
}

ModelBuilder& ModelBuilder::value(const std::string& run, int time, const std::string& var,
                                  const std::string& val) {
  for (auto& r : runs_) {
    if (r.name == run) {
      r.values[{time, var}] = val;
      return *this;
    }
  }
  throw ModelError("value declared for unknown run '" + run + "'");
}

ModelBuilder& ModelBuilder::belief(const std::string& agent, const std::string& run_from, int t_from,
                                   const std::string& run_to, int t_to) {
  edges_.push_back(EdgeDecl{agent, run_from, run_to, t_from, t_to});
  return *this;
}

ModelBuilder& ModelBuilder::rigid_group(std::string name, std::vector<std::string> members) {
  GroupDecl g;
  g.name = std::move(name);
  g.rigid = true;
  g.rigid_members = std::move(members);
  groups_.push_back(std::move(g));
  return *this;
}

ModelBuilder& ModelBuilder::group(std::string name) {
  GroupDecl g;
  g.name = std::move(name);
  groups_.push_back(std::move(g));
  return *this;
}

ModelBuilder& ModelBuilder::member(const std::string& group, const std::string& run, int time,
                                   const std::string& agent) {
  for (auto& g : groups_) {
    if (g.name == group) {
      if (g.rigid) throw ModelError("per-point membership declared for rigid group '" + group + "'");
      g.members.emplace_back(run, time, agent);
      return *this;
    }
  }
  throw ModelError("membership declared for unknown group '" + group + "'");
}

ModelBuilder& ModelBuilder::stamp(std::string name) {
  stamps_.push_back(StampDecl{std::move(name), {}});
  return *this;
}

ModelBuilder& ModelBuilder::stamp_time(const std::string& stamp, const std::string& agent,
                                       const std::string& run, int time) {
  for (auto& s : stamps_) {
    if (s.name == stamp) {
      s.times[{agent, run}] = time;
      return *this;
    }
  }
  throw ModelError("time declared for unknown stamp '" + stamp + "'");
}

ModelBuilder& ModelBuilder::acting(const std::string& group, const std::string& agent,
                                   const std::string& run, int time) {
  acting_.push_back(FlagDecl{group, agent, run, time});
  return *this;
}

ModelBuilder& ModelBuilder::should(const std::string& group, const std::string& agent,
                                   const std::string& run, int time) {
  should_.push_back(FlagDecl{group, agent, run, time});
  return *this;
}

Model ModelBuilder::build() const {
  Model m;

  auto require_ident = [](const std::string& n, const char* what) {
    if (!is_identifier(n)) throw ModelError(std::string(what) + " name '" + n + "' is not an identifier");
  };

  if (agents_.empty()) throw ModelError("model needs at least one agent");
  if (agents_.size() > 64) throw ModelError("at most 64 agents are supported");
  for (const auto& a : agents_) {
    require_ident(a, "agent");
    m.agents_.push_back(a);
  }
  {
    std::set<std::string> seen(agents_.begin(), agents_.end());
    if (seen.size() != agents_.size()) throw ModelError("duplicate agent declaration");
  }

  for (const auto& [name, domain] : variables_) {
    require_ident(name, "variable");
    if (domain.empty()) throw ModelError("variable '" + name + "' has an empty domain");
    for (const auto& v : domain)
      if (!is_value_token(v)) throw ModelError("value '" + v + "' of variable '" + name + "' is not a token");
    if (m.variable_index(name) >= 0) throw ModelError("duplicate variable '" + name + "'");
    m.variables_.push_back(name);
    m.domains_.push_back(domain);
  }

  if (runs_.empty()) throw ModelError("model needs at least one run");
  std::vector<const RunDecl*> order;
  for (const auto& r : runs_) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const RunDecl* a, const RunDecl* b) { return a->name < b->name; });
  for (const auto* r : order) {
    require_ident(r->name, "run");
    if (m.run_index(r->name) >= 0) throw ModelError("duplicate run '" + r->name + "'");
    if (r->horizon <= 0) throw ModelError("run '" + r->name + "' needs a positive horizon");
    m.run_names_.push_back(r->name);
    m.horizons_.push_back(r->horizon);
  }
  m.run_offset_.resize(m.run_count());
  int total = 0;
  for (int r = 0; r < m.run_count(); ++r) {
    m.run_offset_[r] = total;
    total += m.horizons_[r];
    for (int t = 0; t < m.horizons_[r]; ++t) m.point_run_.push_back(r);
  }
  m.total_points_ = total;

  m.vals_.assign(static_cast<size_t>(total) * m.variable_count(), -1);
  for (const auto* r : order) {
    int ri = m.run_index(r->name);
    for (const auto& [key, val] : r->values) {
      auto [time, var] = key;
      if (time < 0 || time >= r->horizon)
        throw ModelError("valuation time " + std::to_string(time) + " outside horizon of run '" +
                         r->name + "'");
      int v = m.variable_index(var);
      if (v < 0) throw ModelError("valuation for unknown variable '" + var + "'");
      int vi = m.value_index(v, val);
      if (vi < 0)
        throw ModelError("value '" + val + "' not in the domain of variable '" + var + "'");
      m.vals_[(m.run_offset_[ri] + time) * m.variable_count() + v] = vi;
    }
  }

  m.succ_.assign(m.agent_count(), std::vector<std::vector<int>>(total));
  auto resolve_point = [&m](const std::string& run, int time, const char* what) {
    int r = m.run_index(run);
    if (r < 0) throw ModelError(std::string(what) + " references unknown run '" + run + "'");
    if (time < 0 || time >= m.horizons_[r])
      throw ModelError(std::string(what) + " references time " + std::to_string(time) +
                       " outside horizon of run '" + run + "'");
    return m.run_offset_[r] + time;
  };
  for (const auto& e : edges_) {
    int a = m.agent_index(e.agent);
    if (a < 0) throw ModelError("belief edge for unknown agent '" + e.agent + "'");
    int from = resolve_point(e.run_from, e.t_from, "belief edge");
    int to = resolve_point(e.run_to, e.t_to, "belief edge");
    m.succ_[a][from].push_back(to);
  }
  for (auto& rel : m.succ_) {
    for (auto& s : rel) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
  }

  for (const auto& g : groups_) {
    require_ident(g.name, "group");
    if (m.group_index(g.name) >= 0) throw ModelError("duplicate group '" + g.name + "'");
    if (m.agent_index(g.name) >= 0)
      throw ModelError("group '" + g.name + "' collides with an agent name");
    m.group_names_.push_back(g.name);
    m.group_rigid_.push_back(g.rigid ? 1 : 0);
    std::vector<uint64_t> mask(total, 0);
    if (g.rigid) {
      if (g.rigid_members.empty()) throw ModelError("rigid group '" + g.name + "' has no members");
      uint64_t bits = 0;
      for (const auto& a : g.rigid_members) {
        int ai = m.agent_index(a);
        if (ai < 0) throw ModelError("group '" + g.name + "' lists unknown agent '" + a + "'");
        bits |= uint64_t{1} << ai;
      }
      std::fill(mask.begin(), mask.end(), bits);
    } else {
      for (const auto& [run, time, agent] : g.members) {
        int ai = m.agent_index(agent);
        if (ai < 0) throw ModelError("group '" + g.name + "' lists unknown agent '" + agent + "'");
        int p = resolve_point(run, time, ("membership of group '" + g.name + "'").c_str());
        mask[p] |= uint64_t{1} << ai;
      }
    }
    m.members_.push_back(std::move(mask));
  }

  for (const auto& s : stamps_) {
    require_ident(s.name, "stamp");
    if (m.stamp_index(s.name) >= 0) throw ModelError("duplicate stamp '" + s.name + "'");
    m.stamp_names_.push_back(s.name);
    std::vector<int> table(static_cast<size_t>(m.agent_count()) * m.run_count(), -1);
    for (const auto& [key, t] : s.times) {
      const auto& [agent, run] = key;
      int a = m.agent_index(agent);
      if (a < 0) throw ModelError("stamp '" + s.name + "' references unknown agent '" + agent + "'");
      int r = m.run_index(run);
      if (r < 0) throw ModelError("stamp '" + s.name + "' references unknown run '" + run + "'");
      table[a * m.run_count() + r] = t;  // range is validate()'s business
    }
    m.stamps_.push_back(std::move(table));
  }

  m.acting_.assign(m.group_count(), std::vector<uint64_t>(total, 0));
  m.should_.assign(m.group_count(), std::vector<uint64_t>(total, 0));
  auto apply_flags = [&](const std::vector<FlagDecl>& decls,
                         std::vector<std::vector<uint64_t>>& table, const char* what) {
    for (const auto& f : decls) {
      int g = m.group_index(f.group);
      if (g < 0) throw ModelError(std::string(what) + " flag for unknown group '" + f.group + "'");
      int a = m.agent_index(f.agent);
      if (a < 0) throw ModelError(std::string(what) + " flag for unknown agent '" + f.agent + "'");
      int p = resolve_point(f.run, f.time, what);
      table[g][p] |= uint64_t{1} << a;
    }
  };
  apply_flags(acting_, m.acting_, "acting");
  apply_flags(should_, m.should_, "should_act");

  return m;
}

}  // namespace beliefmc
