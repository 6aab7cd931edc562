#pragma once

#include <unordered_map>
#include <vector>

#include "beliefmc/formula.hpp"
#include "beliefmc/model.hpp"

namespace beliefmc {

// Straight-line reference semantics: naive recursion, with every common
// belief operator expanded as the literal chain E^1 & E^2 & ... & E^k.
// Serves as the independent oracle for the fixpoint evaluator and as the
// serial baseline in benchmarks.  At k = point count the chain value has
// saturated and equals the fixpoint.
class RefEvaluator {
 public:
  // nesting_k < 0 selects the saturation depth (one level per model point).
  explicit RefEvaluator(const Model& m, int nesting_k = -1);

  bool holds(const Formula& f, Point p);
  int nesting_k() const { return k_; }

 private:
  const std::vector<Formula>& chain(const Formula& c);
  bool eval(const Formula& f, int p);

  const Model& m_;
  int k_;
  // Truth cache per (node, point).  The caches key on node addresses, so
  // every formula ever handed to holds() is retained in roots_ (and the
  // expanded E^j links in chains_) to keep those addresses from being
  // reused by later parses.
  std::unordered_map<const detail::Node*, std::vector<int8_t>> memo_;
  std::unordered_map<const detail::Node*, std::vector<Formula>> chains_;
  std::vector<Formula> roots_;
};

// Truth value of a single common-belief formula (C, C[t:...], or Ca) with
// its chain cut off at depth k.  Throws std::invalid_argument for any other
// formula shape.
bool bounded_nesting_oracle(const Model& m, const Formula& c, Point p, int k);

}  // namespace beliefmc
