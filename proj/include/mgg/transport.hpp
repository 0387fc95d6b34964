#pragma once

// Moving application conditions across a rule (precondition <-> postcondition)
// and turning graph constraints on a derivation state into application
// conditions of the neighbouring rules.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/conditions.hpp"
#include "mgg/sequence.hpp"

namespace mgg {

namespace detail {

inline std::string nihil_anchor_name(Anchor a) { return a == Anchor::Post ? "Q" : "K"; }

/// L and K (preconditions) or R and Q (postconditions) of `p` as anchor
/// graphs. K and Q hold the rule's nihilation edges among the side's nodes.
inline std::vector<DiagramGraph> anchor_graphs(const Production& p, Anchor a) {
  const TypedGraph side = compact(a == Anchor::Post ? p.rhs : p.lhs);
  const BoolMatrix& nihil = a == Anchor::Post ? invert(p).nihil : p.nihil;
  TypedGraph k(BoolMatrix(side.universe()), side.nodes, side.typing);
  for (auto [i, j] : nihil.entries()) {
    const std::string& s = p.universe()[i].id;
    const std::string& t = p.universe()[j].id;
    if (side.has_node(s) && side.has_node(t)) k.edges.set(s, t);
  }
  DiagramGraph g(side_name(a), side);
  DiagramGraph n(nihil_anchor_name(a), k);
  g.anchor = n.anchor = true;
  return {std::move(g), std::move(n)};
}

inline bool has_anchor_graphs(const Condition& c) {
  for (const auto& g : c.graphs)
    if (g.anchor) return true;
  return false;
}

/// Node of `var` -> rule element id, through morphisms leaving the side or an
/// anchor graph.
inline NodeMap side_identification(const Condition& c, const std::string& var) {
  NodeMap out;
  for (const auto& d : c.morphisms) {
    if (d.to != var || !(c.is_side(d.from) || c.graph(d.from).anchor)) continue;
    for (const auto& [rid, x] : d.map) {
      auto [it, fresh] = out.emplace(x, rid);
      if (!fresh && it->second != rid)
        throw ConditionError("node '" + x + "' of '" + var + "' is identified with two rule elements");
    }
  }
  return out;
}

/// Swaps the side and anchor names of `c` (L,K <-> R,Q) and installs
/// freshly built anchors for `to`.
inline void reanchor(Condition& c, const Production& p, Anchor to) {
  const Anchor from = c.anchor;
  std::map<std::string, std::string> names{{side_name(from), side_name(to)},
                                           {nihil_anchor_name(from), nihil_anchor_name(to)}};
  const bool anchors = has_anchor_graphs(c);
  std::vector<DiagramGraph> graphs;
  for (auto& g : c.graphs)
    if (!g.anchor) graphs.push_back(std::move(g));
  if (anchors)
    for (auto& a : anchor_graphs(p, to)) graphs.push_back(std::move(a));
  c.graphs = std::move(graphs);
  for (auto& d : c.morphisms) {
    if (auto it = names.find(d.from); it != names.end()) d.from = it->second;
  }
  auto rn = [&](const std::string& v) {
    auto it = names.find(v);
    return it == names.end() ? v : it->second;
  };
  c.formula = from_tree(map_vars(to_tree(c.formula), rn));
  c.anchor = to;
  c.rule = p;
}

/// Values of the atoms of a graph that holds trivially once anchored.
inline ExprPtr substitute_trivial(const ExprPtr& e, const std::string& var, const DiagramGraph& x) {
  using K = Expr::Kind;
  if (e->kind == K::Atom && e->atom.var == var) {
    const bool edges = x.graph.edge_count() > 0;
    if (e->atom.pred == Pred::Q) {
      if (!edges) throw ConditionError("Q(" + var + ") is undefined: the graph has no edges");
      return constant(!e->atom.complement);
    }
    if (!e->atom.complement) return constant(true);
    return constant(!edges && x.nihil.is_zero());
  }
  if (is_quantifier(e) && e->var == var) return substitute_trivial(e->args[0], var, x);
  if (e->args.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& a : copy->args) a = substitute_trivial(a, var, x);
  return copy;
}

/// Whether `var` occurs in an atom whose truth depends on edges the rule
/// touches beyond what the additive update keeps: P(X, ~G) or Q(X, G).
inline bool needs_minimal_update(const ExprPtr& e, const std::string& var) {
  if (e->kind == Expr::Kind::Atom && e->atom.var == var)
    return (e->atom.pred == Pred::P) == e->atom.complement;
  for (const auto& a : e->args)
    if (needs_minimal_update(a, var)) return true;
  return false;
}

/// What the rule decides about a graph on its own, independent of the host.
struct CarryFacts {
  bool minimal = false;
  bool deleted_certainty = false;  // some certainty edge is deleted by the rule
  bool forced_nihil = false;       // some nihil edge is forced absent by the match
  bool had_edges = false;
};

inline ExprPtr fold_carried(const ExprPtr& e, const std::map<std::string, CarryFacts>& facts,
                            const Condition& c) {
  if (e->kind == Expr::Kind::Atom) {
    auto it = facts.find(e->atom.var);
    if (it == facts.end()) return e;
    const CarryFacts& f = it->second;
    const bool empty_now = c.graph(e->atom.var).graph.edge_count() == 0;
    if (e->atom.pred == Pred::Q && !f.had_edges) return e;  // undefined either way
    if (e->atom.pred == Pred::Q && e->atom.complement) return empty_now ? constant(false) : e;
    if (!f.minimal) return e;
    if (e->atom.pred == Pred::Q) return f.deleted_certainty ? constant(true) : e;
    if (e->atom.complement && (f.deleted_certainty || f.forced_nihil)) return constant(false);
    return e;
  }
  if (e->args.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& a : copy->args) a = fold_carried(a, facts, c);
  return copy;
}

/// Carries `c` (anchored on t's left-hand side) over the rule `t`; the result
/// hangs from t's right-hand side. `p` is the rule the condition belongs to
/// and `to` the resulting anchor.
inline Condition carry(const Condition& c0, const Production& t, const Production& p, Anchor to) {
  Condition c = normalize(c0);
  auto deleted = [&](const std::string& id) { return t.e_nodes.get(id); };
  auto e_has = [&](const std::string& a, const std::string& b) { return t.e_edges.get(a, b); };
  auto r_has = [&](const std::string& a, const std::string& b) { return t.r_edges.get(a, b); };

  const ExprPtr original = to_tree(c.formula);
  std::map<std::string, std::set<std::string>> kept_nodes;
  std::map<std::string, CarryFacts> facts;
  std::vector<DiagramGraph> graphs;
  for (const auto& x : c.graphs) {
    if (x.anchor) {
      graphs.push_back(x);
      continue;
    }
    const std::string name = x.name();
    const NodeMap ident = side_identification(c, name);
    auto rid = [&](const std::string& n) -> const std::string* {
      auto it = ident.find(n);
      return it == ident.end() ? nullptr : &it->second;
    };
    auto gone = [&](const std::string& n) {
      const std::string* r = rid(n);
      return r && deleted(*r);
    };
    CarryFacts& fx = facts[name];
    fx.minimal = needs_minimal_update(original, name);
    fx.had_edges = x.graph.edge_count() > 0;
    const auto& xu = x.graph.universe();
    for (auto [i, j] : x.graph.edges.entries()) {
      const std::string &a = xu[i].id, &b = xu[j].id;
      if (rid(a) && rid(b) && e_has(*rid(a), *rid(b))) fx.deleted_certainty = true;
      if (!gone(a) && !gone(b)) continue;
      if (!rid(a) || !rid(b) || !e_has(*rid(a), *rid(b)))
        throw ConditionError("inconsistent condition: edge (" + a + "," + b + ") of '" + name +
                             "' would dangle once '" + t.name + "' deletes its node");
    }
    for (auto [i, j] : x.nihil.entries()) {
      const std::string &a = xu[i].id, &b = xu[j].id;
      if (!gone(a) && !gone(b)) continue;
      if (rid(a) && rid(b) && e_has(*rid(a), *rid(b)))
        throw ConditionError("inconsistent condition: '" + name + "' forbids edge (" + a + "," + b +
                             ") that '" + t.name + "' requires");
      fx.forced_nihil = true;  // would dangle, so it is absent
    }
    std::set<std::string> keep;
    for (const auto& n : x.graph.node_ids())
      if (!gone(n)) keep.insert(n);
    DiagramGraph y = x;
    y.graph = restrict_to(x.graph, keep);
    y.nihil = BoolMatrix(y.graph.universe());
    for (auto [i, j] : x.nihil.entries())
      if (keep.count(xu[i].id) && keep.count(xu[j].id)) y.nihil.set(xu[i].id, xu[j].id);
    for (const auto& a : keep)
      for (const auto& b : keep) {
        if (!rid(a) || !rid(b)) continue;
        const bool ex = e_has(*rid(a), *rid(b)), rx = r_has(*rid(a), *rid(b));
        const bool cert = y.graph.edges.get(a, b), nih = y.nihil.get(a, b);
        if (cert && rx)
          throw ConditionError("inconsistent condition: '" + name + "' requires edge (" + a + "," + b +
                               ") that '" + t.name + "' forbids");
        if (nih && ex)
          throw ConditionError("inconsistent condition: '" + name + "' forbids edge (" + a + "," + b +
                               ") that '" + t.name + "' requires");
        if (nih && rx) fx.forced_nihil = true;
        if (fx.minimal) {
          y.graph.edges.set(a, b, !ex && cert);
          y.nihil.set(a, b, !rx && nih);
        } else {
          y.graph.edges.set(a, b, rx || (!ex && cert));
          y.nihil.set(a, b, ex || (!rx && nih));
        }
      }
    kept_nodes[name] = std::move(keep);
    graphs.push_back(std::move(y));
  }
  c.graphs = std::move(graphs);

  // Restrict morphisms to surviving nodes; rule elements must survive t.
  std::vector<DiagramMorphism> ms;
  for (auto d : c.morphisms) {
    auto alive = [&](const std::string& g, const std::string& n) {
      if (c.is_side(g) || c.graph(g).anchor) return !deleted(n);
      return kept_nodes.at(g).count(n) > 0;
    };
    NodeMap map;
    for (const auto& [a, b] : d.map)
      if (alive(d.from, a) && alive(d.to, b)) map.emplace(a, b);
    d.map = std::move(map);
    if (!d.map.empty()) ms.push_back(std::move(d));
  }
  c.morphisms = std::move(ms);
  c.formula = from_tree(fold_carried(original, facts, c));
  reanchor(c, p, to);

  // Graphs pinned completely to the new side that hold there by construction.
  const TypedGraph& side = t.rhs;
  const BoolMatrix absent = invert(t).nihil;
  ExprPtr tree = to_tree(c.formula);
  std::vector<DiagramGraph> survivors;
  for (const auto& x : c.graphs) {
    if (x.anchor) {
      survivors.push_back(x);
      continue;
    }
    const NodeMap ident = side_identification(c, x.name());
    bool trivial = ident.size() == x.graph.node_count();
    for (const auto& n : x.graph.node_ids()) {
      if (!trivial) break;
      const TypeSet& need = side.type_of(ident.at(n));
      const TypeSet& have = x.graph.type_of(n);
      for (const auto& ty : need.types()) trivial = trivial && have.contains(ty);
    }
    const auto& xu = x.graph.universe();
    for (auto [i, j] : x.graph.edges.entries())
      trivial = trivial && side.has_edge(ident.at(xu[i].id), ident.at(xu[j].id));
    for (auto [i, j] : x.nihil.entries())
      trivial = trivial && absent.get(ident.at(xu[i].id), ident.at(xu[j].id));
    if (trivial)
      tree = substitute_trivial(tree, x.name(), x);
    else
      survivors.push_back(x);
  }
  c.graphs = std::move(survivors);
  c.formula = from_tree(simplify(tree));
  prune(c);
  return c;
}

}  // namespace detail

/// Precondition -> equivalent postcondition of the same rule. Among the nodes
/// identified with L, certainty parts lose what the rule deletes and gain
/// what it adds, nihil parts the other way round. A graph used in P(X, ~G)
/// or Q(X, G) only loses edges, and the atoms the rule decides on its own are
/// folded into constants. Graphs that become trivially true on R are dropped
/// from diagram and formula.
inline Condition pre_to_post(const Condition& c) {
  if (c.anchor != Anchor::Pre) throw ConditionError("pre_to_post needs a precondition");
  return detail::carry(c, *c.rule, *c.rule, Anchor::Post);
}

/// Postcondition -> precondition, through the inverse rule.
inline Condition post_to_pre(const Condition& c) {
  if (c.anchor != Anchor::Post) throw ConditionError("post_to_pre needs a postcondition");
  return detail::carry(c, invert(*c.rule), *c.rule, Anchor::Pre);
}

/// One pre-post-pre (or post-pre-post) round: the condition adapted to its
/// rule. A further round leaves it unchanged.
inline Condition adapted_fixpoint(const Condition& c) {
  if (c.anchor == Anchor::Pre) return post_to_pre(pre_to_post(c));
  if (c.anchor == Anchor::Post) return pre_to_post(post_to_pre(c));
  throw ConditionError("only application conditions can be adapted");
}

namespace detail {

/// Postcondition of steps[k] read as precondition of steps[k+1]: nodes
/// identified with R_k must also be matched by L_{k+1} (same global id).
inline Condition post_as_next_pre(const Condition& c0, const Production& next) {
  Condition c = normalize(c0);
  for (const auto& d : c.morphisms) {
    if (!(c.is_side(d.from) || c.graph(d.from).anchor)) continue;
    for (const auto& [rid, x] : d.map)
      if (!next.lhs.has_node(rid))
        throw ConditionError("cannot move the condition onto '" + next.name + "': node '" + x + "' of '" +
                             d.to + "' is bound to '" + rid + "', which '" + next.name + "' does not match");
  }
  c.match.reset();
  c.anchor = Anchor::Post;
  reanchor(c, next, Anchor::Pre);
  return c;
}

inline Condition pre_as_previous_post(const Condition& c0, const Production& prev) {
  Condition c = normalize(c0);
  for (const auto& d : c.morphisms) {
    if (!(c.is_side(d.from) || c.graph(d.from).anchor)) continue;
    for (const auto& [rid, x] : d.map)
      if (!prev.rhs.has_node(rid))
        throw ConditionError("cannot move the condition onto '" + prev.name + "': node '" + x + "' of '" +
                             d.to + "' is bound to '" + rid + "', which '" + prev.name + "' does not produce");
  }
  c.match.reset();
  reanchor(c, prev, Anchor::Post);
  return c;
}

}  // namespace detail

/// Graph constraint on state `state` of `s` (state 0 is the initial graph,
/// state k the graph after steps[k-1]) as an application condition of
/// steps[rule]: precondition when rule >= state, postcondition otherwise.
/// Adjacent positions just add the rule's anchors; farther ones are reached
/// by carrying the condition across the rules in between.
inline Condition delocalize(const Condition& gc, const CompletedSequence& s, std::size_t state, std::size_t rule) {
  if (gc.anchor != Anchor::None) throw ConditionError("delocalize expects a graph constraint");
  if (state > s.size() || rule >= s.size()) throw InputError("state or rule index out of range");
  validate(gc);

  auto anchored = [&](std::size_t k, Anchor a) {
    Condition c = gc;
    c.anchor = a;
    c.rule = s.steps[k];
    for (auto& g : detail::anchor_graphs(s.steps[k], a)) c.graphs.push_back(std::move(g));
    const std::string side = side_name(a), nihil = detail::nihil_anchor_name(a);
    ExprPtr body = conj({atom_p(side, false), atom_p(nihil, true), to_tree(gc.formula)});
    c.formula = from_tree(quantified(false, side, quantified(false, nihil, body)));
    return c;
  };

  if (rule >= state) {
    Condition c = anchored(state, Anchor::Pre);
    for (std::size_t k = state; k < rule; ++k) c = detail::post_as_next_pre(pre_to_post(c), s.steps[k + 1]);
    return c;
  }
  Condition c = anchored(state - 1, Anchor::Post);
  for (std::size_t k = state - 1; k > rule; --k) c = detail::pre_as_previous_post(post_to_pre(c), s.steps[k - 1]);
  return c;
}

}  // namespace mgg
