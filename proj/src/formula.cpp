#include "beliefmc/formula.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace beliefmc {

using detail::Node;

namespace {

std::shared_ptr<const Node> mk(Node n) { return std::make_shared<const Node>(std::move(n)); }

}  // namespace

Formula Formula::atom(VarRef var, int value) {
  Node n;
  n.kind = Kind::Atom;
  n.var = var;
  n.value = value;
  return Formula(mk(std::move(n)));
}

Formula Formula::negation(Formula f) {
  Node n;
  n.kind = Kind::Not;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::conj(Formula a, Formula b) {
  Node n;
  n.kind = Kind::And;
  n.left = a.n_;
  n.right = b.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::disj(Formula a, Formula b) {
  return negation(conj(negation(a), negation(b)));
}

Formula Formula::implies(Formula a, Formula b) { return disj(negation(a), b); }

Formula Formula::believes(int agent, Formula f) {
  Node n;
  n.kind = Kind::Believes;
  n.agent = agent;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::everyone(GroupRef g, Formula f) {
  Node n;
  n.kind = Kind::Everyone;
  n.group = g;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::common(GroupRef g, Formula f) {
  Node n;
  n.kind = Kind::Common;
  n.group = g;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::everyone_t(GroupRef g, int stamp, Formula f) {
  Node n;
  n.kind = Kind::EveryoneT;
  n.group = g;
  n.stamp = stamp;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::common_t(GroupRef g, int stamp, Formula f) {
  Node n;
  n.kind = Kind::CommonT;
  n.group = g;
  n.stamp = stamp;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::everyone_a(GroupRef g, Formula f) {
  Node n;
  n.kind = Kind::EveryoneA;
  n.group = g;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::common_a(GroupRef g, Formula f) {
  Node n;
  n.kind = Kind::CommonA;
  n.group = g;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

Formula Formula::chi(GroupRef g) {
  Node n;
  n.kind = Kind::Chi;
  n.group = g;
  return Formula(mk(std::move(n)));
}

Formula Formula::alw(Formula f) {
  Node n;
  n.kind = Kind::Alw;
  n.left = f.n_;
  return Formula(mk(std::move(n)));
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok {
  Ident,
  Number,  // token starting with a digit (value position only)
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Colon,
  Comma,
  Equals,
  Bang,
  Amp,
  Pipe,
  Arrow,
  End,
};

struct Token {
  Tok type;
  std::string text;
  size_t offset;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { tokenize(); }
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

 private:
  void tokenize() {
    size_t i = 0;
    int line = 1, col = 1;
    auto push = [&](Tok t, size_t start, size_t len, int l, int c) {
      toks_.push_back({t, std::string(src_.substr(start, len)), start, l, c});
    };
    while (i < src_.size()) {
      char ch = src_[i];
      if (ch == '\n') {
        ++line;
        col = 1;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
        ++col;
        continue;
      }
      int l = line, c = col;
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
        size_t start = i;
        while (i < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_'))
          ++i;
        bool digit_led = std::isdigit(static_cast<unsigned char>(ch));
        push(digit_led ? Tok::Number : Tok::Ident, start, i - start, l, c);
        col += static_cast<int>(i - start);
        continue;
      }
      if (ch == '-' && i + 1 < src_.size() && src_[i + 1] == '>') {
        push(Tok::Arrow, i, 2, l, c);
        i += 2;
        col += 2;
        continue;
      }
      Tok t;
      switch (ch) {
        case '(': t = Tok::LParen; break;
        case ')': t = Tok::RParen; break;
        case '{': t = Tok::LBrace; break;
        case '}': t = Tok::RBrace; break;
        case '[': t = Tok::LBracket; break;
        case ']': t = Tok::RBracket; break;
        case ':': t = Tok::Colon; break;
        case ',': t = Tok::Comma; break;
        case '=': t = Tok::Equals; break;
        case '!': t = Tok::Bang; break;
        case '&': t = Tok::Amp; break;
        case '|': t = Tok::Pipe; break;
        default:
          throw ParseError("unexpected character '" + std::string(1, ch) + "'", i, line, col);
      }
      push(t, i, 1, l, c);
      ++i;
      ++col;
    }
    toks_.push_back({Tok::End, "", src_.size(), line, col});
  }

  std::string_view src_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Colon: return "':'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Bang: return "'!'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::End: return "end of input";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser: implies := or ('->' implies)? ; or := and ('|' and)* ;
//         and := unary ('&' unary)* ; unary := '!' unary | primary.

class Parser {
 public:
  Parser(std::string_view text, const Model& m) : lex_(text), m_(m) {}

  Formula parse() {
    Formula f = parse_implies();
    expect(Tok::End);
    return f;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& expected) {
    std::ostringstream os;
    os << "parse error at " << t.line << ":" << t.col << ": expected " << expected << ", found "
       << (t.type == Tok::End ? "end of input" : "'" + t.text + "'");
    throw ParseError(os.str(), t.offset, t.line, t.col);
  }

  Token expect(Tok type) {
    if (lex_.peek().type != type) fail(lex_.peek(), tok_name(type));
    return lex_.next();
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (lex_.peek().type == Tok::Arrow) {
      lex_.next();
      return Formula::implies(lhs, parse_implies());  // right-associative
    }
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (lex_.peek().type == Tok::Pipe) {
      lex_.next();
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (lex_.peek().type == Tok::Amp) {
      lex_.next();
      f = Formula::conj(f, parse_unary());
    }
    return f;
  }

  Formula parse_unary() {
    if (lex_.peek().type == Tok::Bang) {
      lex_.next();
      return Formula::negation(parse_unary());
    }
    return parse_primary();
  }

  Formula parse_primary() {
    const Token& t = lex_.peek();
    if (t.type == Tok::LParen) {
      lex_.next();
      Formula f = parse_implies();
      expect(Tok::RParen);
      return f;
    }
    if (t.type != Tok::Ident) fail(t, "a formula");
    // Operator forms are recognized by shape: the identifier plus the
    // token that follows it.  Anything else is an atom.
    Tok after = lex_.peek(1).type;
    const std::string& name = t.text;
    if (name == "ALW" && after == Tok::LParen) {
      lex_.next();
      return Formula::alw(parse_arg());
    }
    if (name == "chi" && after == Tok::LBrace) {
      lex_.next();
      return Formula::chi(parse_group());
    }
    if (name.size() > 2 && name.starts_with("B_") && after == Tok::LParen) {
      Token op = lex_.next();
      int agent = m_.agent_index(name.substr(2));
      if (agent < 0) throw ResolveError("unknown agent '" + name.substr(2) + "'");
      (void)op;
      return Formula::believes(agent, parse_arg());
    }
    if ((name == "E" || name == "C") && after == Tok::LBracket) {
      lex_.next();
      lex_.next();  // '['
      Token kw = expect(Tok::Ident);
      if (kw.text != "t") fail(kw, "'t'");
      expect(Tok::Colon);
      Token sn = expect(Tok::Ident);
      int stamp = m_.stamp_index(sn.text);
      if (stamp < 0) throw ResolveError("unknown stamp function '" + sn.text + "'");
      expect(Tok::RBracket);
      GroupRef g = parse_group();
      Formula arg = parse_arg();
      return name == "E" ? Formula::everyone_t(g, stamp, arg) : Formula::common_t(g, stamp, arg);
    }
    if ((name == "E" || name == "C" || name == "Ea" || name == "Ca") && after == Tok::LBrace) {
      lex_.next();
      GroupRef g = parse_group();
      Formula arg = parse_arg();
      if (name == "E") return Formula::everyone(g, arg);
      if (name == "C") return Formula::common(g, arg);
      if (name == "Ea") return Formula::everyone_a(g, arg);
      return Formula::common_a(g, arg);
    }
    return parse_atom();
  }

  Formula parse_arg() {
    expect(Tok::LParen);
    Formula f = parse_implies();
    expect(Tok::RParen);
    return f;
  }

  GroupRef parse_group() {
    Token open = expect(Tok::LBrace);
    if (lex_.peek().type == Tok::RBrace)
      fail(lex_.peek(), "a group name or a non-empty agent list");
    std::vector<std::string> names;
    names.push_back(expect(Tok::Ident).text);
    while (lex_.peek().type == Tok::Comma) {
      lex_.next();
      names.push_back(expect(Tok::Ident).text);
    }
    expect(Tok::RBrace);
    (void)open;
    GroupRef g;
    if (names.size() == 1) {
      int gi = m_.group_index(names[0]);
      if (gi >= 0) {
        g.named = gi;
        return g;
      }
    }
    for (const auto& n : names) {
      int a = m_.agent_index(n);
      if (a < 0)
        throw ResolveError("'" + n + "' names neither a declared group nor an agent");
      g.rigid_mask |= uint64_t{1} << a;
    }
    return g;
  }

  Formula parse_atom() {
    Token name = expect(Tok::Ident);
    expect(Tok::Equals);
    const Token& vt = lex_.peek();
    if (vt.type != Tok::Ident && vt.type != Tok::Number) fail(vt, "a value token");
    Token val = lex_.next();
    std::optional<VarRef> ref;
    try {
      ref = m_.resolve_variable(name.text);
    } catch (const LookupError& e) {
      throw ResolveError(e.what());
    }
    if (!ref) throw ResolveError("unknown variable '" + name.text + "'");
    if (std::holds_alternative<int>(*ref)) {
      int var = std::get<int>(*ref);
      int vi = m_.value_index(var, val.text);
      if (vi < 0)
        throw ResolveError("value '" + val.text + "' is not in the domain of variable '" +
                           name.text + "'");
      return Formula::atom(*ref, vi);
    }
    if (val.text != "0" && val.text != "1")
      throw ResolveError("flag variable '" + name.text + "' only takes values 0 and 1");
    return Formula::atom(*ref, val.text == "1" ? 1 : 0);
  }

  Lexer lex_;
  const Model& m_;
};

std::string render_group(const GroupRef& g, const Model& m) {
  std::string out = "{";
  if (g.named >= 0) {
    out += m.group_name(g.named);
  } else {
    bool first = true;
    for (int a = 0; a < 64; ++a) {
      if ((g.rigid_mask >> a) & 1u) {
        if (!first) out += ",";
        out += m.agent_name(a);
        first = false;
      }
    }
  }
  out += "}";
  return out;
}

std::string render_var(const VarRef& v, const Model& m) {
  if (std::holds_alternative<int>(v)) return m.variable_name(std::get<int>(v));
  const FlagRef& f = std::get<FlagRef>(v);
  const char* prefix = f.kind == FlagRef::Acting      ? "ACTING_"
                       : f.kind == FlagRef::ShouldAct ? "SHOULD_ACT_"
                                                      : "MEMBER_";
  return std::string(prefix) + m.agent_name(f.agent) + "_" + m.group_name(f.group);
}

}  // namespace

Formula parse(std::string_view text, const Model& m) { return Parser(text, m).parse(); }

std::string render(const Formula& f, const Model& m) {
  switch (f.kind()) {
    case Kind::Atom: {
      const VarRef& v = f.var();
      if (std::holds_alternative<int>(v)) {
        int var = std::get<int>(v);
        return m.variable_name(var) + "=" + m.domain(var)[f.value()];
      }
      return render_var(v, m) + "=" + (f.value() ? "1" : "0");
    }
    case Kind::Not: return "!(" + render(f.child(), m) + ")";
    case Kind::And: return "(" + render(f.left(), m) + " & " + render(f.right(), m) + ")";
    case Kind::Believes: return "B_" + m.agent_name(f.agent()) + "(" + render(f.child(), m) + ")";
    case Kind::Everyone: return "E" + render_group(f.group(), m) + "(" + render(f.child(), m) + ")";
    case Kind::Common: return "C" + render_group(f.group(), m) + "(" + render(f.child(), m) + ")";
    case Kind::EveryoneT:
      return "E[t:" + m.stamp_name(f.stamp()) + "]" + render_group(f.group(), m) + "(" +
             render(f.child(), m) + ")";
    case Kind::CommonT:
      return "C[t:" + m.stamp_name(f.stamp()) + "]" + render_group(f.group(), m) + "(" +
             render(f.child(), m) + ")";
    case Kind::EveryoneA:
      return "Ea" + render_group(f.group(), m) + "(" + render(f.child(), m) + ")";
    case Kind::CommonA:
      return "Ca" + render_group(f.group(), m) + "(" + render(f.child(), m) + ")";
    case Kind::Chi: return "chi" + render_group(f.group(), m);
    case Kind::Alw: return "ALW(" + render(f.child(), m) + ")";
  }
  return "";
}

std::string struct_key(const Formula& f) {
  std::ostringstream os;
  switch (f.kind()) {
    case Kind::Atom:
      if (std::holds_alternative<int>(f.var()))
        os << "v:" << std::get<int>(f.var()) << ":" << f.value();
      else {
        const FlagRef& fl = std::get<FlagRef>(f.var());
        os << "f:" << static_cast<int>(fl.kind) << ":" << fl.agent << ":" << fl.group << ":"
           << f.value();
      }
      return os.str();
    case Kind::Not: return "!(" + struct_key(f.child()) + ")";
    case Kind::And: return "&(" + struct_key(f.left()) + "," + struct_key(f.right()) + ")";
    case Kind::Believes:
      os << "B" << f.agent() << "(" << struct_key(f.child()) << ")";
      return os.str();
    default: break;
  }
  auto group_key = [](const GroupRef& g) {
    std::ostringstream gs;
    if (g.named >= 0)
      gs << "g" << g.named;
    else
      gs << "m" << g.rigid_mask;
    return gs.str();
  };
  switch (f.kind()) {
    case Kind::Everyone: os << "E"; break;
    case Kind::Common: os << "C"; break;
    case Kind::EveryoneT: os << "Et" << f.stamp(); break;
    case Kind::CommonT: os << "Ct" << f.stamp(); break;
    case Kind::EveryoneA: os << "Ea"; break;
    case Kind::CommonA: os << "Ca"; break;
    case Kind::Chi: return "chi[" + group_key(f.group()) + "]";
    case Kind::Alw: return "A(" + struct_key(f.child()) + ")";
    default: break;
  }
  os << "[" << group_key(f.group()) << "](" << struct_key(f.child()) << ")";
  return os.str();
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.node() == b.node()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Atom: return a.var() == b.var() && a.value() == b.value();
    case Kind::Not:
    case Kind::Alw: return structurally_equal(a.child(), b.child());
    case Kind::And:
      return structurally_equal(a.left(), b.left()) && structurally_equal(a.right(), b.right());
    case Kind::Believes:
      return a.agent() == b.agent() && structurally_equal(a.child(), b.child());
    case Kind::Everyone:
    case Kind::Common:
    case Kind::EveryoneA:
    case Kind::CommonA:
      return a.group() == b.group() && structurally_equal(a.child(), b.child());
    case Kind::EveryoneT:
    case Kind::CommonT:
      return a.group() == b.group() && a.stamp() == b.stamp() &&
             structurally_equal(a.child(), b.child());
    case Kind::Chi: return a.group() == b.group();
  }
  return false;
}

namespace {
void collect(const Formula& f, std::vector<Formula>& out, std::map<std::string, bool>& seen) {
  switch (f.kind()) {
    case Kind::Atom:
    case Kind::Chi: break;
    case Kind::And:
      collect(f.left(), out, seen);
      collect(f.right(), out, seen);
      break;
    default: collect(f.child(), out, seen); break;
  }
  std::string key = struct_key(f);
  if (!seen.count(key)) {
    seen[key] = true;
    out.push_back(f);
  }
}
}  // namespace

std::vector<Formula> subformulas(const Formula& f) {
  std::vector<Formula> out;
  std::map<std::string, bool> seen;
  collect(f, out, seen);
  return out;
}

}  // namespace beliefmc
