#pragma once

// Normal forms of condition formulas and direct evaluation of conditions on
// a host graph.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/diagram.hpp"

namespace mgg {

namespace detail {

/// Negation normal form: implications removed, negations pushed onto atoms
/// (flipping quantifiers on the way).
inline ExprPtr nnf(const ExprPtr& e, bool neg) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Const: return constant(e->value != neg);
    case K::Atom: return neg ? negate(e) : e;
    case K::Not: return nnf(e->args[0], !neg);
    case K::And:
    case K::Or: {
      std::vector<ExprPtr> kids;
      for (const auto& a : e->args) kids.push_back(nnf(a, neg));
      const bool is_and = (e->kind == K::And) != neg;
      return nary(is_and ? K::And : K::Or, std::move(kids));
    }
    case K::Implies:
      if (neg) return nary(K::And, {nnf(e->args[0], false), nnf(e->args[1], true)});
      return nary(K::Or, {nnf(e->args[0], true), nnf(e->args[1], false)});
    case K::Exists:
    case K::Forall: {
      const bool universal = (e->kind == K::Forall) != neg;
      return quantified(universal, e->var, nnf(e->args[0], neg));
    }
  }
  return e;
}

/// Flattens nested And/Or and folds constants.
inline ExprPtr simplify(const ExprPtr& e) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Const:
    case K::Atom: return e;
    case K::Not: {
      ExprPtr a = simplify(e->args[0]);
      if (a->kind == K::Const) return constant(!a->value);
      if (a->kind == K::Not) return a->args[0];
      return negate(a);
    }
    case K::Implies: {
      ExprPtr a = simplify(e->args[0]);
      ExprPtr b = simplify(e->args[1]);
      if (a->kind == K::Const) return a->value ? b : constant(true);
      if (b->kind == K::Const && b->value) return b;
      return implies(a, b);
    }
    case K::And:
    case K::Or: {
      const bool is_and = e->kind == K::And;
      std::vector<ExprPtr> kids;
      for (const auto& a : e->args) {
        ExprPtr k = simplify(a);
        if (k->kind == K::Const) {
          if (k->value == is_and) continue;  // neutral element
          return constant(!is_and);          // absorbing element
        }
        if (k->kind == e->kind)
          kids.insert(kids.end(), k->args.begin(), k->args.end());
        else
          kids.push_back(k);
      }
      return is_and ? conj(std::move(kids)) : disj(std::move(kids));
    }
    case K::Exists:
    case K::Forall: {
      ExprPtr body = simplify(e->args[0]);
      // exists over false and forall over true do not depend on the domain
      if (body->kind == K::Const && body->value == (e->kind == K::Forall)) return body;
      return quantified(e->kind == K::Forall, e->var, body);
    }
  }
  return e;
}

inline bool has_forall(const ExprPtr& e) {
  if (e->kind == Expr::Kind::Forall) return true;
  for (const auto& a : e->args)
    if (has_forall(a)) return true;
  return false;
}

}  // namespace detail

/// Validated condition with implied morphisms materialized and its formula
/// in negation normal form.
inline Condition normalize(const Condition& c) {
  validate(c);
  Condition out = materialize(c);
  out.formula = from_tree(detail::simplify(detail::nnf(to_tree(c.formula), false)));
  return out;
}

/// Where a condition is evaluated: the host itself for graph constraints and
/// preconditions, the derived graph for postconditions. `anchored` maps rule
/// element ids to host ids.
struct EvalContext {
  TypedGraph host;
  NodeMap anchored;
};

/// Evaluation context for a condition with a fixed match (or none needed).
/// Throws DanglingEdgeError when the rule cannot be applied at the match.
inline EvalContext context(const Condition& c, const TypedGraph& g) {
  if (c.anchor == Anchor::None) return {g, {}};
  if (!c.match) throw ConditionError("an application condition needs a fixed match here");
  const Production& p = *c.rule;
  Morphism m{*c.match, {}};
  if (!is_match(p, g, m)) throw InvalidMatchError("the fixed match is not a match of '" + p.name + "'");
  if (c.anchor == Anchor::Pre) {
    apply(p, g, m, 0);  // must not dangle
    return {g, *c.match};
  }
  DerivationResult d = apply(p, g, m, 0);
  return {d.after, d.comatch};
}

namespace detail {

class Evaluator {
public:
  Evaluator(const Condition& c, const TypedGraph& host, const NodeMap& anchored)
      : c_(c), host_(host), anchored_(anchored) {}

  bool eval(const ExprPtr& e) {
    using K = Expr::Kind;
    switch (e->kind) {
      case K::Const: return e->value;
      case K::Atom: return atom_value(e->atom);
      case K::Not: return !eval(e->args[0]);
      case K::And:
        for (const auto& a : e->args)
          if (!eval(a)) return false;
        return true;
      case K::Or:
        for (const auto& a : e->args)
          if (eval(a)) return true;
        return false;
      case K::Implies: return !eval(e->args[0]) || eval(e->args[1]);
      case K::Exists:
      case K::Forall: {
        const bool universal = e->kind == K::Forall;
        bool result = universal;
        for (auto& f : domain(e->var)) {
          env_[e->var] = std::move(f);
          if (eval(e->args[0]) != universal) {
            result = !universal;
            break;
          }
        }
        env_.erase(e->var);
        return result;
      }
    }
    return false;
  }

  /// Assignments of `var`: node-total injective maps into the host that agree
  /// with every morphism to an already assigned graph, with the anchor and
  /// with the variable's own pin.
  std::vector<NodeMap> domain(const std::string& var) const {
    const DiagramGraph& x = c_.graph(var);
    NodeMap pins;
    bool clash = false;
    auto want = [&](const std::string& node, const std::string& host) {
      auto [it, fresh] = pins.emplace(node, host);
      if (!fresh && it->second != host) clash = true;
    };
    if (x.anchor)
      for (const auto& n : x.graph.node_ids()) {
        auto it = anchored_.find(n);
        if (it == anchored_.end()) return {};
        want(n, it->second);
      }
    if (x.pin)
      for (const auto& [n, h] : *x.pin) want(n, h);
    for (const auto& d : c_.morphisms) {
      if (d.to == var) {
        if (const NodeMap* a = assignment(d.from))
          for (const auto& [s, t] : d.map)
            if (auto it = a->find(s); it != a->end()) want(t, it->second);
      } else if (d.from == var) {
        if (const NodeMap* a = assignment(d.to))
          for (const auto& [s, t] : d.map)
            if (auto it = a->find(t); it != a->end()) want(s, it->second);
      }
    }
    if (clash) return {};
    std::vector<NodeMap> out;
    for (auto& m : par_max(x.graph, host_, &pins)) out.push_back(std::move(m.node_map));
    return out;
  }

private:
  const NodeMap* assignment(const std::string& name) const {
    if (c_.is_side(name) || c_.graph(name).anchor) return &anchored_;
    auto it = env_.find(name);
    return it == env_.end() ? nullptr : &it->second;
  }

  bool atom_value(const Atom& a) const {
    const DiagramGraph& x = c_.graph(a.var);
    const NodeMap* f = assignment(a.var);
    if (!f) throw ConditionError("variable '" + a.var + "' is not bound here");
    const Universe& u = x.graph.universe();
    auto present = [&](std::size_t i, std::size_t j) {
      return host_.has_edge(f->at(u[i].id), f->at(u[j].id));
    };
    auto certainty = x.graph.edges.entries();
    auto nihil = x.nihil.entries();
    if (a.pred == Pred::Q) {
      if (certainty.empty())
        throw ConditionError("Q(" + a.var + ") is undefined: the graph has no edges");
      for (auto [i, j] : certainty)
        if (present(i, j) != a.complement) return true;
      return false;
    }
    for (auto [i, j] : certainty)
      if (present(i, j) == a.complement) return false;
    for (auto [i, j] : nihil)
      if (present(i, j) != a.complement) return false;
    return true;
  }

  const Condition& c_;
  const TypedGraph& host_;
  const NodeMap& anchored_;
  std::map<std::string, NodeMap> env_;
};

}  // namespace detail

/// Truth of a condition on `g`. A graph constraint is evaluated on g. An
/// application condition holds when some match of its rule (the fixed one,
/// if any) applies without dangling edges and the formula holds with the
/// rule side bound to it: on g for preconditions, on the derived graph for
/// postconditions.
inline bool satisfies(const TypedGraph& g, const Condition& c) {
  validate(c);
  const Condition d = materialize(c);
  const ExprPtr tree = to_tree(d.formula);
  if (d.anchor == Anchor::None) {
    const NodeMap none;
    return detail::Evaluator(d, g, none).eval(tree);
  }
  std::vector<NodeMap> matches;
  if (d.match) {
    matches.push_back(*d.match);
  } else {
    for (auto& m : find_matches(*d.rule, g)) matches.push_back(std::move(m.node_map));
  }
  for (const auto& m : matches) {
    Condition at = d;
    at.match = m;
    EvalContext ctx;
    try {
      ctx = context(at, g);
    } catch (const DanglingEdgeError&) {
      continue;
    } catch (const InvalidMatchError&) {
      continue;
    }
    if (detail::Evaluator(at, ctx.host, ctx.anchored).eval(tree)) return true;
  }
  return false;
}

/// Application condition evaluated at one match of its rule.
inline bool holds_at(const TypedGraph& g, const Condition& c, const NodeMap& match) {
  Condition at = c;
  at.match = match;
  return satisfies(g, at);
}

}  // namespace mgg
