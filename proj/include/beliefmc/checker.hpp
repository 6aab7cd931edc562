#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "beliefmc/formula.hpp"
#include "beliefmc/model.hpp"

namespace beliefmc {

struct EvalOptions {
  bool parallel = true;   // evaluate point loops with OpenMP when available
  bool skip_validation_check = false;  // trust the caller (test plumbing)
};

// The one-step relation underlying each common-belief operator.
struct ReachKind {
  enum Mode { Standard, TimeStamped, ActionStamped };
  Mode mode = Standard;
  int stamp = -1;  // TimeStamped only

  static ReachKind standard() { return {Standard, -1}; }
  static ReachKind time_stamped(int stamp) { return {TimeStamped, stamp}; }
  static ReachKind action_stamped() { return {ActionStamped, -1}; }
};

// The set of points of one model where a formula holds.
class Extension {
 public:
  Extension() = default;
  Extension(Formula f, const Model* m, std::vector<uint8_t> holds)
      : f_(std::move(f)), m_(m), holds_(std::move(holds)) {}

  const Formula& formula() const { return f_; }
  bool holds(int point) const { return holds_.at(point) != 0; }
  bool holds(Point p) const { return holds(m_->point_index_checked(p)); }
  const std::vector<uint8_t>& bits() const { return holds_; }
  std::vector<Point> points() const;  // sorted (run, time)
  int count() const;

 private:
  Formula f_;
  const Model* m_ = nullptr;
  std::vector<uint8_t> holds_;
};

// Fixpoint/reachability evaluator.  Extensions are computed bottom-up over
// subformulas and cached per structural key, so repeated checks against the
// same evaluator are cheap.
class Evaluator {
 public:
  explicit Evaluator(const Model& m, EvalOptions opts = {});

  bool check(const Formula& f, Point p);
  Extension extension(const Formula& f);

  // All points reachable from `from` in one or more steps of the given
  // kind, sorted by (run, time).
  std::vector<Point> reachable_set(const GroupRef& g, Point from,
                                   ReachKind kind);

  const Model& model() const { return m_; }

 private:
  const std::vector<uint8_t>& ext(const Formula& f);
  std::vector<int> step_targets(const GroupRef& g, ReachKind kind,
                                int point) const;

  const Model& m_;
  EvalOptions opts_;
  std::unordered_map<std::string, std::vector<uint8_t>> cache_;
};

// One-shot conveniences over a throwaway Evaluator.
bool check(const Model& m, const Formula& f, Point p, EvalOptions opts = {});
Extension extension(const Model& m, const Formula& f, EvalOptions opts = {});
std::vector<Point> reachable_set(const Model& m, const GroupRef& g, Point p,
                                 ReachKind kind, EvalOptions opts = {});
// Name-resolving form for front ends; throws LookupError on unknown names.
std::vector<Point> reachable_set(const Model& m, const std::string& group,
                                 Point p, ReachKind::Mode mode,
                                 const std::string& stamp = {},
                                 EvalOptions opts = {});

}  // namespace beliefmc
