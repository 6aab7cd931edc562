#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace beliefmc {

// A point is one instant (run, time) of one possible system evolution.
struct Point {
  int run = -1;
  int time = -1;
  friend auto operator<=>(const Point&, const Point&) = default;
};

// Unknown name / invalid coordinate in a lookup against a built model.
class LookupError : public std::runtime_error {
 public:
  explicit LookupError(const std::string& what) : std::runtime_error(what) {}
};

// Structural misuse while assembling a model (unknown reference, duplicate
// declaration, out-of-range coordinate).  Semantic rules (KD45, stamp
// totality, valuation totality) are *reported* by validate(), not thrown.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

struct Violation {
  std::string rule;     // serial | transitive | euclidean | timestamp | valuation | reference
  std::string element;  // offending element, human-readable
  std::string detail;
};

struct ValidationReport {
  bool passed = false;
  std::vector<Violation> violations;
};

// Derived Boolean pseudo-variables exposed to the formula language:
// ACTING_<agent>_<group>, SHOULD_ACT_<agent>_<group>, MEMBER_<agent>_<group>.
struct FlagRef {
  enum Kind { Acting, ShouldAct, Member };
  Kind kind = Acting;
  int agent = -1;
  int group = -1;
  friend auto operator<=>(const FlagRef&, const FlagRef&) = default;
};

// Either a declared variable (index) or a derived flag variable.
using VarRef = std::variant<int, FlagRef>;

class ModelBuilder;

// A finite multi-run model: runs with per-point valuations, one
// serial/transitive/Euclidean belief relation per agent, indexical group
// interpretations, time-stamp functions, and per-group action flags.
// Immutable once built; validate() is pure and cached, so a validated
// model is safe for concurrent read access.
class Model {
 public:
  // --- agents ---
  int agent_count() const { return static_cast<int>(agents_.size()); }
  const std::string& agent_name(int i) const { return agents_.at(i); }
  int agent_index(std::string_view name) const;  // -1 if unknown
  int agent_index_checked(std::string_view name) const;

  // --- variables ---
  int variable_count() const { return static_cast<int>(variables_.size()); }
  const std::string& variable_name(int v) const { return variables_.at(v); }
  const std::vector<std::string>& domain(int v) const { return domains_.at(v); }
  int variable_index(std::string_view name) const;  // declared only; -1 if unknown
  int value_index(int var, std::string_view value) const;  // -1 if not in domain
  // Declared variable or derived flag; nullopt if the name resolves to
  // neither.  Throws LookupError if a flag-shaped name is ambiguous.
  std::optional<VarRef> resolve_variable(std::string_view name) const;

  // --- runs and points ---
  int run_count() const { return static_cast<int>(run_names_.size()); }
  const std::string& run_name(int r) const { return run_names_.at(r); }
  int run_index(std::string_view name) const;  // -1 if unknown
  int horizon(int r) const { return horizons_.at(r); }
  int point_count() const { return total_points_; }
  bool valid_point(Point p) const {
    return p.run >= 0 && p.run < run_count() && p.time >= 0 && p.time < horizons_[p.run];
  }
  int point_index(Point p) const { return run_offset_[p.run] + p.time; }
  int point_index_checked(Point p) const;
  Point point_at(int idx) const;
  int run_of_point(int idx) const { return point_run_.at(idx); }

  // --- valuation ---
  // Raw table entry; -1 marks a gap (reported by validate as "valuation").
  int raw_value(int point, int var) const { return vals_[point * variable_count() + var]; }
  // Name-based valuation lookup: returns the value token at p, including
  // derived flag variables (absent flag declarations read as "0").
  std::string value_at(Point p, std::string_view var_name) const;

  // --- belief relations ---
  std::span<const int> successors(int agent, int point) const;
  std::vector<Point> successors(std::string_view agent, Point p) const;

  // --- groups ---
  int group_count() const { return static_cast<int>(group_names_.size()); }
  const std::string& group_name(int g) const { return group_names_.at(g); }
  int group_index(std::string_view name) const;  // -1 if unknown
  bool group_is_rigid(int g) const { return group_rigid_.at(g); }
  uint64_t membership_mask(int group, int point) const { return members_[group][point]; }
  bool is_member(int group, int point, int agent) const {
    return (members_[group][point] >> agent) & 1u;
  }
  std::vector<std::string> membership(std::string_view group, Point p) const;

  // --- time-stamp functions ---
  int stamp_count() const { return static_cast<int>(stamp_names_.size()); }
  const std::string& stamp_name(int s) const { return stamp_names_.at(s); }
  int stamp_index(std::string_view name) const;  // -1 if unknown
  // Stamped time for (agent, run); -1 when undefined (validate reports it).
  int stamp_time(int stamp, int agent, int run) const {
    return stamps_[stamp][agent * run_count() + run];
  }

  // --- action flags ---
  bool acting(int group, int agent, int point) const {
    return (acting_[group][point] >> agent) & 1u;
  }
  bool should_act(int group, int agent, int point) const {
    return (should_[group][point] >> agent) & 1u;
  }
  uint64_t acting_mask(int group, int point) const { return acting_[group][point]; }
  uint64_t should_mask(int group, int point) const { return should_[group][point]; }

  // --- validation ---
  // Deterministic; computed once and cached.  Lists every violated rule.
  const ValidationReport& validation() const;
  bool validated_ok() const { return validation().passed; }

  // Copy with one group's acting flags replaced (used by the time-stamp
  // embedding check; the original model is untouched).
  Model with_acting_flags(int group, const std::vector<uint64_t>& acting_by_point) const;

 private:
  friend class ModelBuilder;
  Model() = default;
  void check_kd45(ValidationReport& rep) const;

  std::vector<std::string> agents_;
  std::vector<std::string> variables_;
  std::vector<std::vector<std::string>> domains_;
  std::vector<std::string> run_names_;  // sorted ascending; point order = (run, time)
  std::vector<int> horizons_;
  std::vector<int> run_offset_;
  std::vector<int> point_run_;
  int total_points_ = 0;
  std::vector<int> vals_;                            // [point * nvars + var], -1 = gap
  std::vector<std::vector<std::vector<int>>> succ_;  // [agent][point] sorted
  std::vector<std::string> group_names_;
  std::vector<char> group_rigid_;
  std::vector<std::vector<uint64_t>> members_;  // [group][point] agent bitmask
  std::vector<std::string> stamp_names_;
  std::vector<std::vector<int>> stamps_;          // [stamp][agent * nruns + run], -1 = undefined
  std::vector<std::vector<uint64_t>> acting_;     // [group][point] agent bitmask
  std::vector<std::vector<uint64_t>> should_;     // [group][point]
  mutable std::optional<ValidationReport> validation_cache_;
};

// Assembles a Model from named declarations.  All cross-references are
// resolved in build(); unknown names and invalid coordinates throw
// ModelError there.  Runs are ordered by id, so point indices (and hence
// all iteration in the checker) follow (run id, time) ascending.
class ModelBuilder {
 public:
  ModelBuilder& agent(std::string name);
  ModelBuilder& variable(std::string name, std::vector<std::string> domain);
  ModelBuilder& run(std::string name, int horizon);
  ModelBuilder& value(const std::string& run, int time, const std::string& var,
                      const std::string& val);
  ModelBuilder& belief(const std::string& agent, const std::string& run_from, int t_from,
                       const std::string& run_to, int t_to);
  ModelBuilder& rigid_group(std::string name, std::vector<std::string> members);
  ModelBuilder& group(std::string name);  // indexical; membership defaults to empty
  ModelBuilder& member(const std::string& group, const std::string& run, int time,
                       const std::string& agent);
  ModelBuilder& stamp(std::string name);
  ModelBuilder& stamp_time(const std::string& stamp, const std::string& agent,
                           const std::string& run, int time);
  ModelBuilder& acting(const std::string& group, const std::string& agent,
                       const std::string& run, int time);
  ModelBuilder& should(const std::string& group, const std::string& agent,
                       const std::string& run, int time);

  Model build() const;

 private:
  struct RunDecl {
    std::string name;
    int horizon = 0;
    std::map<std::pair<int, std::string>, std::string> values;  // (time, var) -> value
  };
  struct EdgeDecl {
    std::string agent, run_from, run_to;
    int t_from = 0, t_to = 0;
  };
  struct GroupDecl {
    std::string name;
    bool rigid = false;
    std::vector<std::string> rigid_members;
    std::vector<std::tuple<std::string, int, std::string>> members;  // (run, time, agent)
  };
  struct StampDecl {
    std::string name;
    std::map<std::pair<std::string, std::string>, int> times;  // (agent, run) -> t
  };
  struct FlagDecl {
    std::string group, agent, run;
    int time = 0;
  };

  std::vector<std::string> agents_;
  std::vector<std::pair<std::string, std::vector<std::string>>> variables_;
  std::vector<RunDecl> runs_;
  std::vector<EdgeDecl> edges_;
  std::vector<GroupDecl> groups_;
  std::vector<StampDecl> stamps_;
  std::vector<FlagDecl> acting_, should_;
};

// Identifier rule shared by agents, variables, runs, groups and stamps.
bool is_identifier(std::string_view s);
// Value tokens additionally admit a leading digit.
bool is_value_token(std::string_view s);

std::string point_label(const Model& m, int point);
std::string point_label(const Model& m, Point p);

}  // namespace beliefmc
