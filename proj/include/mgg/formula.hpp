#pragma once

// Prenex formulas over graph variables with inclusion (P) and partial
// overlap (Q) atoms. Text syntax:
//
//   forall A0 exists A1 [A0 => A1]
//   nexists A [P(A, ~G) | !Q(A)]
//
// A bare variable X stands for P(X, G); "~G" is the complement of the host.

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/error.hpp"

namespace mgg {

enum class Quant { Exists, Forall, NotExists, NotForall };
enum class Pred { P, Q };

struct Quantifier {
  Quant kind;
  std::string var;
  friend bool operator==(const Quantifier&, const Quantifier&) = default;
};

struct Atom {
  Pred pred = Pred::P;
  std::string var;
  bool complement = false;  // second argument is the complement of the host
  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  // Exists/Forall are nested quantifiers over `var` with body args[0].
  enum class Kind { Const, Atom, Not, And, Or, Implies, Exists, Forall };
  Kind kind = Kind::Const;
  bool value = true;
  mgg::Atom atom;
  std::string var;
  std::vector<ExprPtr> args;
};

inline ExprPtr constant(bool v) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Const;
  e->value = v;
  return e;
}
inline ExprPtr atom(Atom a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Atom;
  e->atom = std::move(a);
  return e;
}
inline ExprPtr atom_p(std::string var, bool complement = false) {
  return atom(Atom{Pred::P, std::move(var), complement});
}
inline ExprPtr atom_q(std::string var, bool complement = false) {
  return atom(Atom{Pred::Q, std::move(var), complement});
}
inline ExprPtr negate(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Not;
  e->args = {std::move(a)};
  return e;
}
inline ExprPtr nary(Expr::Kind k, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->args = std::move(args);
  return e;
}
inline ExprPtr conj(std::vector<ExprPtr> args) {
  if (args.empty()) return constant(true);
  if (args.size() == 1) return args[0];
  return nary(Expr::Kind::And, std::move(args));
}
inline ExprPtr disj(std::vector<ExprPtr> args) {
  if (args.empty()) return constant(false);
  if (args.size() == 1) return args[0];
  return nary(Expr::Kind::Or, std::move(args));
}
inline ExprPtr implies(ExprPtr a, ExprPtr b) {
  return nary(Expr::Kind::Implies, {std::move(a), std::move(b)});
}
inline ExprPtr quantified(bool universal, std::string var, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->kind = universal ? Expr::Kind::Forall : Expr::Kind::Exists;
  e->var = std::move(var);
  e->args = {std::move(body)};
  return e;
}
inline bool is_quantifier(const ExprPtr& e) {
  return e->kind == Expr::Kind::Exists || e->kind == Expr::Kind::Forall;
}

struct Formula {
  std::vector<Quantifier> prefix;
  ExprPtr matrix = constant(true);

  const Quantifier* find(const std::string& var) const {
    for (const auto& q : prefix)
      if (q.var == var) return &q;
    return nullptr;
  }
};

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::Const: return a->value == b->value;
    case Expr::Kind::Atom: return a->atom == b->atom;
    case Expr::Kind::Exists:
    case Expr::Kind::Forall:
      return a->var == b->var && equal(a->args[0], b->args[0]);
    default:
      if (a->args.size() != b->args.size()) return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
      return true;
  }
}

/// Variables mentioned by atoms.
inline void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (e->kind == Expr::Kind::Atom) out.insert(e->atom.var);
  for (const auto& a : e->args) collect_vars(a, out);
}

/// Variables bound by nested quantifiers.
inline void collect_bound(const ExprPtr& e, std::set<std::string>& out) {
  if (is_quantifier(e)) out.insert(e->var);
  for (const auto& a : e->args) collect_bound(a, out);
}

/// Replaces variable names in atoms and nested quantifiers.
template <class F>
ExprPtr map_vars(const ExprPtr& e, const F& f) {
  if (e->kind == Expr::Kind::Const) return e;
  if (e->kind == Expr::Kind::Atom) {
    Atom a = e->atom;
    a.var = f(a.var);
    return atom(std::move(a));
  }
  if (is_quantifier(e)) return quantified(e->kind == Expr::Kind::Forall, f(e->var), map_vars(e->args[0], f));
  std::vector<ExprPtr> args;
  for (const auto& a : e->args) args.push_back(map_vars(a, f));
  return nary(e->kind, std::move(args));
}

// ---------------------------------------------------------------------------
// Printing

inline std::string to_string(const Atom& a) {
  if (a.pred == Pred::P && !a.complement) return a.var;
  return std::string(a.pred == Pred::P ? "P(" : "Q(") + a.var + (a.complement ? ", ~G)" : ")");
}

inline std::string to_string(const ExprPtr& e, int parent = 0) {
  // precedence: implies 1, or 2, and 3, not 4
  auto wrap = [&](int prec, const std::string& s) {
    return prec < parent ? "(" + s + ")" : s;
  };
  switch (e->kind) {
    case Expr::Kind::Const: return e->value ? "true" : "false";
    case Expr::Kind::Atom: return to_string(e->atom);
    case Expr::Kind::Not: return "!" + to_string(e->args[0], 4);
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      const bool is_and = e->kind == Expr::Kind::And;
      std::string s;
      for (const auto& a : e->args) {
        if (!s.empty()) s += is_and ? " & " : " | ";
        s += to_string(a, is_and ? 4 : 3);
      }
      return wrap(is_and ? 3 : 2, s);
    }
    case Expr::Kind::Implies:
      return wrap(1, to_string(e->args[0], 2) + " => " + to_string(e->args[1], 1));
    case Expr::Kind::Exists:
    case Expr::Kind::Forall: {
      std::string s = e->kind == Expr::Kind::Forall ? "forall" : "exists";
      ExprPtr body = e;
      // group a chain of equal quantifiers
      while (body->kind == e->kind) {
        s += " " + body->var;
        body = body->args[0];
      }
      return s + " [" + to_string(body) + "]";
    }
  }
  return {};
}

inline const char* keyword(Quant q) {
  switch (q) {
    case Quant::Exists: return "exists";
    case Quant::Forall: return "forall";
    case Quant::NotExists: return "nexists";
    case Quant::NotForall: return "nforall";
  }
  return "";
}

inline std::string to_string(const Formula& f) {
  std::string s;
  for (std::size_t i = 0; i < f.prefix.size(); ++i) {
    if (i == 0 || f.prefix[i].kind != f.prefix[i - 1].kind) s += std::string(keyword(f.prefix[i].kind)) + " ";
    s += f.prefix[i].var + " ";
  }
  return s + "[" + to_string(f.matrix) + "]";
}

/// Prefix folded into nested quantifier nodes; negated quantifiers become
/// a negation around the rest.
inline ExprPtr to_tree(const Formula& f) {
  ExprPtr e = f.matrix;
  for (auto it = f.prefix.rbegin(); it != f.prefix.rend(); ++it) {
    switch (it->kind) {
      case Quant::Exists: e = quantified(false, it->var, e); break;
      case Quant::Forall: e = quantified(true, it->var, e); break;
      case Quant::NotExists: e = negate(quantified(false, it->var, e)); break;
      case Quant::NotForall: e = negate(quantified(true, it->var, e)); break;
    }
  }
  return e;
}

/// Leading chain of quantifier nodes lifted into a prefix.
inline Formula from_tree(ExprPtr e) {
  Formula f;
  while (is_quantifier(e)) {
    f.prefix.push_back({e->kind == Expr::Kind::Forall ? Quant::Forall : Quant::Exists, e->var});
    e = e->args[0];
  }
  f.matrix = std::move(e);
  return f;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class FormulaParser {
public:
  explicit FormulaParser(std::string text) : s_(std::move(text)) {}

  Formula parse() {
    Formula f;
    f.prefix = quantifier_block();
    skip();
    expect('[');
    f.matrix = implication();
    skip();
    expect(']');
    skip();
    if (!at_end()) fail("trailing input");
    std::set<std::string> bound;
    for (const auto& q : f.prefix)
      if (!bound.insert(q.var).second) fail("variable '" + q.var + "' quantified twice");
    for (const auto& v : nested_)
      if (!bound.insert(v).second) fail("variable '" + v + "' quantified twice");
    std::set<std::string> used;
    collect_vars(f.matrix, used);
    for (const auto& v : used)
      if (!bound.count(v)) fail("unbound variable '" + v + "'");
    return f;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConditionError("formula: " + msg + " at offset " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == ':' ||
           c == '#' || c == '/' || c == '+' || c == '@' || c == '$' || c == '>' || c == '?';
  }
  std::string ident() {
    skip();
    std::size_t b = pos_;
    while (!at_end() && ident_char(s_[pos_])) ++pos_;
    return s_.substr(b, pos_ - b);
  }

  ExprPtr implication() {
    ExprPtr lhs = disjunction();
    skip();
    if (s_.compare(pos_, 2, "=>") == 0) {
      pos_ += 2;
      return implies(lhs, implication());
    }
    return lhs;
  }
  ExprPtr disjunction() {
    std::vector<ExprPtr> xs{conjunction()};
    for (;;) {
      skip();
      if (peek() != '|') break;
      ++pos_;
      xs.push_back(conjunction());
    }
    return xs.size() == 1 ? xs[0] : nary(Expr::Kind::Or, std::move(xs));
  }
  ExprPtr conjunction() {
    std::vector<ExprPtr> xs{unary()};
    for (;;) {
      skip();
      if (peek() != '&') break;
      ++pos_;
      xs.push_back(unary());
    }
    return xs.size() == 1 ? xs[0] : nary(Expr::Kind::And, std::move(xs));
  }
  ExprPtr unary() {
    skip();
    if (peek() == '!') {
      ++pos_;
      return negate(unary());
    }
    if (peek() == '(') {
      ++pos_;
      ExprPtr e = implication();
      expect(')');
      return e;
    }
    auto save = pos_;
    std::string w = ident();
    if (w.empty()) fail("expected an atom");
    if (w == "exists" || w == "forall" || w == "nexists" || w == "nforall") {
      pos_ = save;
      return nested();
    }
    if (w == "true") return constant(true);
    if (w == "false") return constant(false);
    skip();
    if ((w == "P" || w == "Q") && peek() == '(') {
      ++pos_;
      Atom a;
      a.pred = w == "P" ? Pred::P : Pred::Q;
      a.var = ident();
      if (a.var.empty()) fail("expected a graph variable");
      skip();
      if (peek() == ',') {
        ++pos_;
        skip();
        if (peek() == '~') {
          ++pos_;
          a.complement = true;
        }
        if (ident() != "G") fail("second argument must be G or ~G");
      }
      expect(')');
      return atom(std::move(a));
    }
    return atom_p(w);
  }

  std::vector<Quantifier> quantifier_block() {
    std::vector<Quantifier> qs;
    for (;;) {
      skip();
      auto save = pos_;
      std::string w = ident();
      Quant q;
      if (w == "exists") q = Quant::Exists;
      else if (w == "forall") q = Quant::Forall;
      else if (w == "nexists") q = Quant::NotExists;
      else if (w == "nforall") q = Quant::NotForall;
      else {
        pos_ = save;
        return qs;
      }
      bool any = false;
      for (;;) {
        skip();
        if (peek() == '[' || at_end()) break;
        auto save2 = pos_;
        std::string v = ident();
        if (v == "exists" || v == "forall" || v == "nexists" || v == "nforall") {
          pos_ = save2;
          break;
        }
        if (v.empty()) fail("expected a graph variable");
        qs.push_back({q, v});
        any = true;
      }
      if (!any) fail("quantifier without variable");
    }
  }

  // quantifier block inside a matrix: "exists X Y [ ... ]"
  ExprPtr nested() {
    std::vector<Quantifier> qs = quantifier_block();
    for (const auto& q : qs) nested_.push_back(q.var);
    expect('[');
    ExprPtr body = implication();
    expect(']');
    return to_tree(Formula{qs, body});
  }

  std::string s_;
  std::size_t pos_ = 0;
  std::vector<std::string> nested_;
};

}  // namespace detail

inline Formula parse_formula(const std::string& text) { return detail::FormulaParser(text).parse(); }

}  // namespace mgg
