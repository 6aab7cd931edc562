#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "beliefmc/model.hpp"

namespace beliefmc {

// Core connectives after desugaring; `|` and `->` never appear as nodes.
enum class Kind {
  Atom,       // VAR=value
  Not,
  And,
  Believes,   // B_i
  Everyone,   // E{G}
  Common,     // C{G}
  EveryoneT,  // E[t:name]{G}
  CommonT,    // C[t:name]{G}
  EveryoneA,  // Ea{G}
  CommonA,    // Ca{G}
  Chi,        // chi{G}
  Alw,        // ALW
};

// A group position in a formula: either a declared (possibly indexical)
// group of the model, or an inline rigid agent set.  Inline sets have no
// name, so no action flags are declared for them: Ea/Ca/chi over an inline
// set quantify over an empty acting set.
struct GroupRef {
  int named = -1;          // model group index when >= 0
  uint64_t rigid_mask = 0; // agent bitmask when named < 0
  friend auto operator<=>(const GroupRef&, const GroupRef&) = default;

  uint64_t members_at(const Model& m, int point) const {
    return named >= 0 ? m.membership_mask(named, point) : rigid_mask;
  }
};

class Formula;

namespace detail {
struct Node {
  Kind kind;
  VarRef var{0};      // Atom
  int value = 0;      // Atom: domain index, or 0/1 for flag variables
  int agent = -1;     // Believes
  GroupRef group;     // Everyone*/Common*/Chi
  int stamp = -1;     // EveryoneT/CommonT
  std::shared_ptr<const Node> left, right;
};
}  // namespace detail

// Immutable formula handle; cheap to copy, shareable across threads.
class Formula {
 public:
  Formula() = default;

  Kind kind() const { return n_->kind; }
  const Formula child() const { return Formula(n_->left); }   // unary operand
  const Formula left() const { return Formula(n_->left); }    // And
  const Formula right() const { return Formula(n_->right); }  // And
  int agent() const { return n_->agent; }
  const GroupRef& group() const { return n_->group; }
  int stamp() const { return n_->stamp; }
  const VarRef& var() const { return n_->var; }
  int value() const { return n_->value; }
  bool valid() const { return n_ != nullptr; }
  const detail::Node* node() const { return n_.get(); }

  static Formula atom(VarRef var, int value);
  static Formula negation(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);      // !(!a & !b)
  static Formula implies(Formula a, Formula b);   // disj(!a, b)
  static Formula believes(int agent, Formula f);
  static Formula everyone(GroupRef g, Formula f);
  static Formula common(GroupRef g, Formula f);
  static Formula everyone_t(GroupRef g, int stamp, Formula f);
  static Formula common_t(GroupRef g, int stamp, Formula f);
  static Formula everyone_a(GroupRef g, Formula f);
  static Formula common_a(GroupRef g, Formula f);
  static Formula chi(GroupRef g);
  static Formula alw(Formula f);

 private:
  explicit Formula(std::shared_ptr<const detail::Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const detail::Node> n_;
};

// Syntax fault, with a position into the source text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t offset, int line, int col)
      : std::runtime_error(msg), offset(offset), line(line), col(col) {}
  size_t offset;
  int line, col;
};

// Well-formed syntax mentioning an unknown agent/variable/group/stamp/value.
class ResolveError : public std::runtime_error {
 public:
  explicit ResolveError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parses the concrete syntax against a model's vocabulary.  `|` and `->`
// are desugared during parsing.  Throws ParseError or ResolveError.
Formula parse(std::string_view text, const Model& m);

// Canonical concrete syntax; parse(render(f), m) reproduces f exactly.
std::string render(const Formula& f, const Model& m);

// Unambiguous structural key, suitable for memo tables and deduplication.
std::string struct_key(const Formula& f);

bool structurally_equal(const Formula& a, const Formula& b);

// Distinct subformulas in post-order: every node's children precede it.
std::vector<Formula> subformulas(const Formula& f);

}  // namespace beliefmc
