#pragma once

// Operators on conditions (closure, decomposition, negative application
// conditions) and their compilation into sets of rule sequences.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/satisfaction.hpp"
#include "mgg/sequence.hpp"

namespace mgg {

struct CompileOptions {
  /// Maximum number of disjuncts while expanding to disjunctive normal form.
  std::size_t branch_cap = 4096;
  /// Maximum number of host instances a single closure step may replicate.
  std::size_t budget = 256;
};

namespace detail {

using Path = std::vector<ExprPtr>;

/// Pre-order search; returns the root-to-node path of the first hit.
inline bool find_path(const ExprPtr& e, const std::function<bool(const ExprPtr&)>& hit, Path& path) {
  path.push_back(e);
  if (hit(e)) return true;
  for (const auto& a : e->args)
    if (find_path(a, hit, path)) return true;
  path.pop_back();
  return false;
}

/// Rebuilds `root` with node `target` (pointer identity) replaced.
inline ExprPtr replace_node(const ExprPtr& root, const Expr* target, const ExprPtr& with) {
  if (root.get() == target) return with;
  if (root->args.empty()) return root;
  auto copy = std::make_shared<Expr>(*root);
  bool changed = false;
  for (auto& a : copy->args) {
    ExprPtr n = replace_node(a, target, with);
    if (n != a) changed = true;
    a = n;
  }
  return changed ? copy : root;
}

inline DiagramGraph& graph_ref(Condition& c, const std::string& name) {
  for (auto& g : c.graphs)
    if (g.name() == name) return g;
  throw ConditionError("unknown diagram graph '" + name + "'");
}

inline bool related(const Condition& c, const std::string& x, const std::string& y) {
  for (const auto& d : c.morphisms)
    if ((d.from == x && d.to == y) || (d.from == y && d.to == x)) return true;
  return false;
}

inline bool fixed_graph(const Condition& c, const std::string& name) {
  if (c.is_side(name)) return true;
  const DiagramGraph& g = c.graph(name);
  return g.anchor || g.pin.has_value();
}

/// Copies the graphs in `vars`, appending `idx` to their replica indices;
/// morphisms touching them are copied onto the copies. Returns old -> new.
inline std::map<std::string, std::string> replicate_graphs(Condition& c, const std::set<std::string>& vars,
                                                           int idx) {
  std::map<std::string, std::string> names;
  std::vector<DiagramGraph> copies;
  for (const auto& g : c.graphs)
    if (vars.count(g.name())) {
      DiagramGraph r = g;
      r.replica.push_back(idx);  // pins carry over; the caller re-pins the branched graph
      names[g.name()] = r.name();
      copies.push_back(std::move(r));
    }
  for (auto& r : copies) {
    if (c.find(r.name())) throw ConditionError("replica name '" + r.name() + "' already in use");
    c.graphs.push_back(std::move(r));
  }
  auto rn = [&](const std::string& n) {
    auto it = names.find(n);
    return it == names.end() ? n : it->second;
  };
  const std::size_t n = c.morphisms.size();
  for (std::size_t i = 0; i < n; ++i) {
    const DiagramMorphism d = c.morphisms[i];
    if (names.count(d.from) || names.count(d.to)) c.morphisms.push_back({rn(d.from), rn(d.to), d.map});
  }
  return names;
}

/// Drops graphs no longer quantified anywhere (anchors stay) and the
/// morphisms that touch them.
inline void prune(Condition& c) {
  std::set<std::string> bound;
  collect_bound(to_tree(c.formula), bound);
  std::vector<DiagramGraph> keep;
  for (auto& g : c.graphs)
    if (g.anchor || bound.count(g.name())) keep.push_back(std::move(g));
  c.graphs = std::move(keep);
  std::vector<DiagramMorphism> ms;
  for (auto& d : c.morphisms)
    if ((c.is_side(d.from) || c.find(d.from)) && c.find(d.to)) ms.push_back(std::move(d));
  c.morphisms = std::move(ms);
}

/// Pins for `var` imposed by the anchor and by pinned graphs in `assigned`;
/// nullopt when they contradict each other.
inline std::optional<NodeMap> fixed_pins(const Condition& c, const std::string& var,
                                         const std::set<std::string>& assigned, const NodeMap& anchored) {
  NodeMap pins;
  bool clash = false;
  auto want = [&](const std::string& node, const std::string& host) {
    auto [it, fresh] = pins.emplace(node, host);
    if (!fresh && it->second != host) clash = true;
  };
  auto image = [&](const std::string& name) -> const NodeMap* {
    if (c.is_side(name) || c.graph(name).anchor) return &anchored;
    if (assigned.count(name) && c.graph(name).pin) return &*c.graph(name).pin;
    return nullptr;
  };
  for (const auto& d : c.morphisms) {
    if (d.to == var) {
      if (const NodeMap* a = image(d.from))
        for (const auto& [s, t] : d.map)
          if (auto it = a->find(s); it != a->end()) want(t, it->second);
    } else if (d.from == var) {
      if (const NodeMap* a = image(d.to))
        for (const auto& [s, t] : d.map)
          if (auto it = a->find(t); it != a->end()) want(s, it->second);
    }
  }
  if (clash) return std::nullopt;
  return pins;
}

inline std::vector<NodeMap> instances(const Condition& c, const std::string& var,
                                      const std::set<std::string>& assigned, const EvalContext& ctx,
                                      const CompileOptions& opt) {
  auto pins = fixed_pins(c, var, assigned, ctx.anchored);
  if (!pins) return {};
  std::vector<NodeMap> out;
  for (auto& m : par_max(c.graph(var).graph, ctx.host, &*pins)) {
    if (out.size() == opt.budget)
      throw ConditionError("closure of '" + var + "' exceeds the budget of " + std::to_string(opt.budget) +
                           " instances");
    out.push_back(std::move(m.node_map));
  }
  return out;
}

inline std::set<std::string> path_vars(const Path& path, std::size_t upto) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < upto; ++i)
    if (is_quantifier(path[i])) out.insert(path[i]->var);
  return out;
}

/// Graphs that are pieces of one decomposed graph: same base and replica
/// indices, non-empty piece tag.
inline bool same_pieces(const DiagramGraph& a, const DiagramGraph& b) {
  return !a.piece.empty() && !b.piece.empty() && a.base == b.base && a.replica == b.replica;
}

/// Replaces `exists B [body]` by the disjunction over B's host instances of
/// `exists B.j [body_j]`, with B.j pinned. Inner graphs are replicated per j.
inline ExprPtr branch_existential(Condition& c, const ExprPtr& tree, const Path& path, std::size_t at,
                                  const EvalContext& ctx, const CompileOptions& opt,
                                  std::set<std::string>& targets) {
  const ExprPtr& node = path[at];
  const std::string var = node->var;
  const ExprPtr body = node->args[0];
  auto inst = instances(c, var, path_vars(path, at), ctx, opt);
  std::set<std::string> inner;
  collect_bound(body, inner);
  inner.insert(var);
  std::vector<ExprPtr> branches;
  std::set<std::string> new_targets;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    auto names = replicate_graphs(c, inner, static_cast<int>(j + 1));
    graph_ref(c, names[var]).pin = inst[j];
    auto rn = [&](const std::string& n) {
      auto it = names.find(n);
      return it == names.end() ? n : it->second;
    };
    branches.push_back(quantified(false, names[var], map_vars(body, rn)));
    for (const auto& t : targets)
      if (names.count(t)) new_targets.insert(names[t]);
  }
  for (const auto& t : targets)
    if (!inner.count(t)) new_targets.insert(t);
  targets = std::move(new_targets);
  return replace_node(tree, node.get(), disj(std::move(branches)));
}

/// Replaces the chain `forall G1 ... Gk [body]` (one graph or the tied pieces
/// of one graph) by the conjunction over host instances of
/// `exists G1.j ... Gk.j [body_j]`, each replica pinned to its instance.
inline ExprPtr expand_universal(Condition& c, const ExprPtr& tree, const Path& path,
                                const EvalContext& ctx, const CompileOptions& opt,
                                std::set<std::string>& targets) {
  const std::size_t at = path.size() - 1;
  const ExprPtr& node = path[at];
  std::vector<std::string> group{node->var};
  ExprPtr body = node->args[0];
  while (body->kind == Expr::Kind::Forall &&
         same_pieces(c.graph(group.front()), c.graph(body->var))) {
    group.push_back(body->var);
    body = body->args[0];
  }
  auto inst = instances(c, group.front(), path_vars(path, at), ctx, opt);
  std::set<std::string> inner;
  collect_bound(body, inner);
  inner.insert(group.begin(), group.end());
  std::vector<ExprPtr> parts;
  for (std::size_t j = 0; j < inst.size(); ++j) {
    auto names = replicate_graphs(c, inner, static_cast<int>(j + 1));
    for (const auto& gv : group) {
      NodeMap pin;
      for (const auto& n : c.graph(gv).graph.node_ids()) pin.emplace(n, inst[j].at(n));
      graph_ref(c, names[gv]).pin = std::move(pin);
    }
    auto rn = [&](const std::string& n) {
      auto it = names.find(n);
      return it == names.end() ? n : it->second;
    };
    ExprPtr part = map_vars(body, rn);
    for (auto it = group.rbegin(); it != group.rend(); ++it) part = quantified(false, names[*it], part);
    parts.push_back(part);
  }
  for (const auto& gv : group) targets.erase(gv);
  return replace_node(tree, node.get(), conj(std::move(parts)));
}

/// Pulls existential quantifiers up through And/Or where that cannot change
/// the meaning: the variable is unrelated to everything quantified in the
/// sibling operands, and for Or it is pinned (its domain is never empty).
inline ExprPtr hoist(const ExprPtr& e, const Condition& c) {
  using K = Expr::Kind;
  if (is_quantifier(e)) return quantified(e->kind == K::Forall, e->var, hoist(e->args[0], c));
  if (e->kind != K::And && e->kind != K::Or) return e;
  std::vector<ExprPtr> kids;
  for (const auto& a : e->args) kids.push_back(hoist(a, c));
  std::vector<std::string> pulled;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    std::set<std::string> others;
    for (std::size_t j = 0; j < kids.size(); ++j)
      if (j != i) collect_bound(kids[j], others);
    while (kids[i]->kind == K::Exists) {
      const std::string& v = kids[i]->var;
      if (e->kind == K::Or && !c.graph(v).pin) break;
      bool free = std::none_of(others.begin(), others.end(), [&](const auto& o) { return related(c, v, o); });
      if (!free) break;
      pulled.push_back(v);
      kids[i] = kids[i]->args[0];
    }
  }
  ExprPtr out = nary(e->kind, std::move(kids));
  for (auto it = pulled.rbegin(); it != pulled.rend(); ++it) out = quantified(false, *it, out);
  return out;
}

}  // namespace detail

/// Closure of a universally quantified graph: every universal `var` (and its
/// replicas) is replaced by one pinned existential replica per host
/// instance, graphs quantified inside it are replicated alongside, and
/// existentials quantified before it that it depends on are first split into
/// their pinned instances. With an empty `var` the outermost universal is
/// closed. Application conditions need a fixed match.
inline Condition closure(const Condition& c0, const TypedGraph& g, const std::string& var = {},
                         const CompileOptions& opt = {}) {
  Condition c = normalize(c0);
  ExprPtr tree = to_tree(c.formula);
  std::string target = var;
  if (target.empty()) {
    detail::Path p;
    if (!detail::find_path(tree, [](const ExprPtr& e) { return e->kind == Expr::Kind::Forall; }, p)) return c;
    target = p.back()->var;
  } else {
    detail::Path p;
    if (!detail::find_path(tree, [&](const ExprPtr& e) { return e->kind == Expr::Kind::Forall && e->var == target; }, p))
      throw ConditionError("'" + target + "' is not universally quantified");
  }
  const EvalContext ctx = context(c, g);
  std::set<std::string> targets{target};
  for (;;) {
    detail::Path path;
    if (!detail::find_path(
            tree, [&](const ExprPtr& e) { return e->kind == Expr::Kind::Forall && targets.count(e->var); }, path))
      break;
    const std::string& v = path.back()->var;
    bool branched = false;
    for (std::size_t i = 0; i + 1 < path.size() && !branched; ++i) {
      if (!is_quantifier(path[i]) || !detail::related(c, path[i]->var, v)) continue;
      if (path[i]->kind == Expr::Kind::Forall)
        throw ConditionError("close '" + path[i]->var + "' before '" + v + "'");
      if (detail::fixed_graph(c, path[i]->var)) continue;
      tree = detail::branch_existential(c, tree, path, i, ctx, opt, targets);
      branched = true;
    }
    if (!branched) tree = detail::expand_universal(c, tree, path, ctx, opt, targets);
  }
  tree = detail::simplify(tree);
  c.formula = from_tree(tree);
  detail::prune(c);
  if (!detail::has_forall(tree)) c.formula = from_tree(detail::simplify(detail::hoist(tree, c)));
  return c;
}

/// Closes universals until none is left.
inline Condition close_all(const Condition& c, const TypedGraph& g, const CompileOptions& opt = {}) {
  Condition out = normalize(c);
  while (detail::has_forall(to_tree(out.formula))) out = closure(out, g, {}, opt);
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition

namespace detail {

inline std::string edge_tag(const Edge& e) { return e.first + ">" + e.second; }

/// Splits `var` into one piece per edge. Every piece keeps all nodes of the
/// graph, the pieces are tied by identity morphisms so they stand for one
/// embedding, and atoms on `var` become combinations of atoms on pieces.
inline Condition decompose_var(const Condition& c0, const std::string& var) {
  Condition c = c0;
  const DiagramGraph x = c.graph(var);
  if (!x.nihil.is_zero()) throw ConditionError("cannot decompose '" + var + "': it has a nihil part");
  const auto edges = x.graph.edge_list();
  if (edges.empty()) throw ConditionError("cannot decompose '" + var + "': it has no edges");

  std::vector<std::string> pieces;
  std::vector<DiagramGraph> added;
  for (const auto& e : edges) {
    DiagramGraph piece = x;
    piece.piece = (x.piece.empty() ? "" : x.piece + "+") + edge_tag(e);
    piece.graph = TypedGraph(BoolMatrix(x.graph.universe()), x.graph.nodes, x.graph.typing);
    piece.graph.edges.set(e.first, e.second);
    pieces.push_back(piece.name());
    added.push_back(std::move(piece));
  }
  std::vector<DiagramGraph> graphs;
  for (auto& g : c.graphs) {
    if (g.name() == var) {
      for (auto& a : added) graphs.push_back(std::move(a));
    } else {
      graphs.push_back(std::move(g));
    }
  }
  c.graphs = std::move(graphs);

  std::vector<DiagramMorphism> ms;
  for (const auto& d : c.morphisms) {
    if (d.from == var)
      for (const auto& p : pieces) ms.push_back({p, d.to, d.map});
    else if (d.to == var)
      for (const auto& p : pieces) ms.push_back({d.from, p, d.map});
    else
      ms.push_back(d);
  }
  NodeMap id;
  for (const auto& n : x.graph.node_ids()) id.emplace(n, n);
  // every pair tied directly, so later composition adds nothing
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j) ms.push_back({pieces[i], pieces[j], id});
  c.morphisms = std::move(ms);

  std::function<ExprPtr(const ExprPtr&)> rw = [&](const ExprPtr& e) -> ExprPtr {
    using K = Expr::Kind;
    if (e->kind == K::Atom && e->atom.var == var) {
      std::vector<ExprPtr> xs;
      for (const auto& p : pieces) xs.push_back(atom_p(p, e->atom.complement));
      return e->atom.pred == Pred::Q ? disj(std::move(xs)) : conj(std::move(xs));
    }
    if (is_quantifier(e) && e->var == var) {
      ExprPtr body = rw(e->args[0]);
      for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
        body = quantified(e->kind == K::Forall, *it, body);
      return body;
    }
    if (e->args.empty()) return e;
    auto copy = std::make_shared<Expr>(*e);
    for (auto& a : copy->args) a = rw(a);
    return copy;
  };
  c.formula = from_tree(simplify(rw(to_tree(c.formula))));
  return c;
}

inline void q_vars(const ExprPtr& e, std::vector<std::string>& out) {
  if (e->kind == Expr::Kind::Atom && e->atom.pred == Pred::Q &&
      std::find(out.begin(), out.end(), e->atom.var) == out.end())
    out.push_back(e->atom.var);
  for (const auto& a : e->args) q_vars(a, out);
}

}  // namespace detail

/// Decomposition: each graph carrying Q atoms (or just `var`) is split into
/// single-edge pieces; Q(A) becomes the disjunction of the pieces, P(A) their
/// conjunction. Conditions without Q atoms are returned unchanged.
inline Condition decompose(const Condition& c0, const std::string& var = {}) {
  Condition c = normalize(c0);
  std::vector<std::string> vars;
  if (var.empty())
    detail::q_vars(to_tree(c.formula), vars);
  else
    vars.push_back(var);
  for (const auto& v : vars) c = detail::decompose_var(c, v);
  return c;
}

/// The disjuncts of an existential condition as separate conditions, each
/// keeping the full quantifier prefix.
inline std::vector<Condition> split_branches(const Condition& c0) {
  Condition c = normalize(c0);
  for (const auto& q : c.formula.prefix)
    if (q.kind != Quant::Exists) throw ConditionError("only existential conditions split into branches");
  std::set<std::string> nested;
  collect_bound(c.formula.matrix, nested);
  if (!nested.empty()) throw ConditionError("branches need a prenex formula");

  std::function<std::vector<std::vector<ExprPtr>>(const ExprPtr&)> dnf =
      [&](const ExprPtr& e) -> std::vector<std::vector<ExprPtr>> {
    using K = Expr::Kind;
    if (e->kind == K::Const) return e->value ? std::vector<std::vector<ExprPtr>>{{}} : std::vector<std::vector<ExprPtr>>{};
    if (e->kind == K::Or) {
      std::vector<std::vector<ExprPtr>> out;
      for (const auto& a : e->args)
        for (auto& d : dnf(a)) out.push_back(std::move(d));
      return out;
    }
    if (e->kind == K::And) {
      std::vector<std::vector<ExprPtr>> out{{}};
      for (const auto& a : e->args) {
        std::vector<std::vector<ExprPtr>> next;
        for (const auto& l : out)
          for (const auto& r : dnf(a)) {
            auto m = l;
            m.insert(m.end(), r.begin(), r.end());
            next.push_back(std::move(m));
          }
        out = std::move(next);
      }
      return out;
    }
    return {{e}};
  };
  std::vector<Condition> out;
  for (auto& lits : dnf(c.formula.matrix)) {
    Condition b = c;
    b.formula.matrix = conj(std::move(lits));
    out.push_back(std::move(b));
  }
  return out;
}

inline std::vector<Condition> decompose_branches(const Condition& c, const std::string& var = {}) {
  return split_branches(decompose(c, var));
}

// ---------------------------------------------------------------------------
// Negative application conditions

enum class NacOrder { CloseFirst, DecomposeFirst };

namespace detail {

/// Table identities for graphs without nihil part and with edges:
/// not P(A, G) = Q(A, ~G), not P(A, ~G) = Q(A, G).
inline ExprPtr negated_p_to_q(const ExprPtr& e, const Condition& c) {
  if (e->kind == Expr::Kind::Not && e->args[0]->kind == Expr::Kind::Atom) {
    const Atom& a = e->args[0]->atom;
    const DiagramGraph& x = c.graph(a.var);
    if (a.pred == Pred::P && x.nihil.is_zero() && x.graph.edge_count() > 0)
      return atom(Atom{Pred::Q, a.var, !a.complement});
  }
  if (e->args.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& a : copy->args) a = negated_p_to_q(a, c);
  return copy;
}

}  // namespace detail

/// Negative application condition operator: for a formula of the shape
/// nexists A [A], closure and decomposition turn it into
/// exists A^11 ... A^mn [ and_i or_j P(A^ij, ~G) ]. Both composition orders
/// are available and give the same condition.
inline Condition nac(const Condition& c0, const TypedGraph& g, NacOrder order = NacOrder::CloseFirst,
                     const CompileOptions& opt = {}) {
  Condition c = normalize(c0);
  c.formula = from_tree(detail::negated_p_to_q(to_tree(c.formula), c));
  std::vector<std::string> vars;
  detail::q_vars(to_tree(c.formula), vars);
  if (order == NacOrder::CloseFirst) {
    c = close_all(c, g, opt);
    return decompose(c);
  }
  for (const auto& v : vars) c = detail::decompose_var(c, v);
  return close_all(c, g, opt);
}

inline std::vector<Condition> nac_branches(const Condition& c, const TypedGraph& g, const CompileOptions& opt = {}) {
  return split_branches(nac(c, g, NacOrder::CloseFirst, opt));
}

// ---------------------------------------------------------------------------
// Compilation into rule sequences

namespace detail {

/// One check on a graph variable: all of its nodes, `present` edges that must
/// be there, `absent` edges that must not.
struct Requirement {
  std::string var;
  std::string name;
  std::vector<Edge> present;
  std::vector<Edge> absent;
  friend bool operator==(const Requirement&, const Requirement&) = default;
};

struct Disjunct {
  std::vector<Requirement> reqs;
  std::set<std::string> vars;  // existentially entered on the way down
};

inline std::vector<Requirement> literal_alternatives(const Condition& c, const Atom& a, bool negated) {
  const DiagramGraph& x = c.graph(a.var);
  std::vector<Edge> cert = x.graph.edge_list();
  std::vector<Edge> nih;
  for (auto [i, j] : x.nihil.entries()) nih.emplace_back(x.graph.universe()[i].id, x.graph.universe()[j].id);
  const std::string id = "id_" + a.var, nid = "nid_" + a.var;
  std::vector<Requirement> out;
  auto one_per_edge = [&](const std::vector<Edge>& es, bool as_present, const std::string& base) {
    for (const auto& e : es) {
      Requirement r{a.var, base, {}, {}};
      (as_present ? r.present : r.absent).push_back(e);
      out.push_back(std::move(r));
    }
  };
  if (a.pred == Pred::Q) {
    if (cert.empty()) throw ConditionError("Q(" + a.var + ") is undefined: the graph has no edges");
    if (!negated) {
      one_per_edge(cert, !a.complement, a.complement ? nid : id);
    } else if (!a.complement) {
      out.push_back({a.var, nid, {}, cert});
    } else {
      out.push_back({a.var, id, cert, {}});
    }
  } else if (!negated) {
    if (!a.complement)
      out.push_back({a.var, id, cert, nih});
    else
      out.push_back({a.var, nid, nih, cert});
  } else if (!a.complement) {
    one_per_edge(cert, false, nid);
    one_per_edge(nih, true, id);
  } else {
    one_per_edge(cert, true, id);
    one_per_edge(nih, false, nid);
  }
  if (out.size() > 1)
    for (auto& r : out) {
      const Edge& e = r.present.empty() ? r.absent.front() : r.present.front();
      r.name += "{" + edge_tag(e) + "}";
    }
  return out;
}

class DnfBuilder {
public:
  DnfBuilder(const Condition& c, std::size_t cap) : c_(c), cap_(cap) {}

  std::vector<Disjunct> run(const ExprPtr& e) {
    using K = Expr::Kind;
    switch (e->kind) {
      case K::Const: return e->value ? std::vector<Disjunct>{Disjunct{}} : std::vector<Disjunct>{};
      case K::Atom: return literal(e->atom, false);
      case K::Not:
        if (e->args[0]->kind != K::Atom) throw ConditionError("formula is not in negation normal form");
        return literal(e->args[0]->atom, true);
      case K::Or: {
        std::vector<Disjunct> out;
        for (const auto& a : e->args)
          for (auto& d : run(a)) {
            out.push_back(std::move(d));
            check(out.size());
          }
        return out;
      }
      case K::And: {
        std::vector<Disjunct> out{Disjunct{}};
        for (const auto& a : e->args) {
          auto rhs = run(a);
          std::vector<Disjunct> next;
          for (const auto& l : out)
            for (const auto& r : rhs) {
              Disjunct m = l;
              for (const auto& q : r.reqs)
                if (std::find(m.reqs.begin(), m.reqs.end(), q) == m.reqs.end()) m.reqs.push_back(q);
              m.vars.insert(r.vars.begin(), r.vars.end());
              next.push_back(std::move(m));
              check(next.size());
            }
          out = std::move(next);
        }
        return out;
      }
      case K::Exists: {
        auto out = run(e->args[0]);
        for (auto& d : out) d.vars.insert(e->var);
        return out;
      }
      case K::Forall: throw ConditionError("universal quantifiers must be closed before compilation");
      case K::Implies: throw ConditionError("formula is not in negation normal form");
    }
    return {};
  }

private:
  std::vector<Disjunct> literal(const Atom& a, bool negated) {
    std::vector<Disjunct> out;
    for (auto& r : literal_alternatives(c_, a, negated)) {
      Disjunct d;
      d.reqs.push_back(std::move(r));
      out.push_back(std::move(d));
    }
    return out;
  }
  void check(std::size_t n) const {
    if (n > cap_)
      throw ConditionError("disjunctive normal form exceeds the branch cap of " + std::to_string(cap_));
  }

  const Condition& c_;
  std::size_t cap_;
};

/// For each quantified variable, the variables whose quantifiers enclose it.
inline void scopes(const ExprPtr& e, std::vector<std::string>& stack,
                   std::map<std::string, std::set<std::string>>& out) {
  if (is_quantifier(e)) {
    out[e->var].insert(stack.begin(), stack.end());
    stack.push_back(e->var);
    scopes(e->args[0], stack, out);
    stack.pop_back();
    return;
  }
  for (const auto& a : e->args) scopes(a, stack, out);
}

/// Rule sequence for one disjunct, or nullopt when its identifications
/// contradict each other.
inline std::optional<CompletedSequence> disjunct_sequence(const Condition& c, const Disjunct& d,
                                                          const std::map<std::string, std::set<std::string>>& scope,
                                                          const EvalContext* ctx) {
  static const NodeMap no_anchor;
  const NodeMap& anchored = ctx ? ctx->anchored : no_anchor;
  std::set<std::string> vars = d.vars;
  for (const auto& r : d.reqs) vars.insert(r.var);
  auto is_fixed_side = [&](const std::string& n) { return c.is_side(n) || (c.find(n) && c.graph(n).anchor); };
  auto active = [&](const std::string& x, const std::string& y) {
    if (is_fixed_side(x) || is_fixed_side(y)) return true;
    auto sx = scope.find(x), sy = scope.find(y);
    return (sx != scope.end() && sx->second.count(y)) || (sy != scope.end() && sy->second.count(x));
  };
  auto in_play = [&](const std::string& n) { return is_fixed_side(n) || vars.count(n); };

  NodeClasses uf;
  for (const auto& v : vars)
    for (const auto& n : c.graph(v).graph.node_ids()) uf.find({v, n});
  for (const auto& m : c.morphisms)
    if (in_play(m.from) && in_play(m.to) && active(m.from, m.to))
      for (const auto& [a, b] : m.map) uf.unite({m.from, a}, {m.to, b});

  std::map<NodeClasses::Key, std::string> global;
  NodeMap binding;
  for (const auto& [root, members] : uf.classes()) {
    std::set<std::string> rule_ids, pins;
    for (const auto& [g, n] : members) {
      if (is_fixed_side(g)) rule_ids.insert(n);
      else if (c.graph(g).pin) pins.insert(c.graph(g).pin->at(n));
    }
    if (rule_ids.size() > 1 || pins.size() > 1) return std::nullopt;
    std::string id;
    if (!rule_ids.empty()) {
      id = *rule_ids.begin();
      if (!pins.empty()) {
        auto it = anchored.find(id);
        if (it == anchored.end() || it->second != *pins.begin()) return std::nullopt;
      }
    } else if (!pins.empty()) {
      id = "@" + *pins.begin();
      binding[id] = *pins.begin();
    } else {
      id = "?" + members.front().first + "." + members.front().second;
    }
    for (const auto& k : members) global[k] = id;
  }

  auto check_for = [&](const std::string& var, const std::string& name, const std::vector<Edge>& present,
                       const std::vector<Edge>& absent) {
    const DiagramGraph& x = c.graph(var);
    GraphBuilder b;
    for (const auto& n : x.graph.node_ids()) {
      const std::string& gid = x.anchor ? n : global.at({var, n});
      b.node(ElemId(gid, n), x.graph.type_of(n));
    }
    auto gid = [&](const std::string& n) { return x.anchor ? n : global.at({var, n}); };
    for (const auto& [s, t] : present) b.edge(gid(s), gid(t));
    TypedGraph present_graph = b.build();
    BoolMatrix forbid(present_graph.universe());
    for (const auto& [s, t] : absent) forbid.set(gid(s), gid(t));
    return check_rule(name, present_graph, forbid);
  };

  std::vector<Production> checks;
  for (const auto& r : d.reqs) checks.push_back(check_for(r.var, r.name, r.present, r.absent));
  for (const auto& v : d.vars) {
    const DiagramGraph& x = c.graph(v);
    if (x.anchor || x.pin) continue;
    bool covered = std::any_of(d.reqs.begin(), d.reqs.end(), [&](const Requirement& r) { return r.var == v; });
    if (covered) continue;
    // fully determined graphs need no existence check, only a look at the host
    bool resolved = ctx != nullptr;
    std::set<std::string> image;
    for (const auto& n : x.graph.node_ids()) {
      if (!resolved) break;
      const std::string& id = global.at({v, n});
      std::string h;
      if (id.front() == '@') h = id.substr(1);
      else if (auto it = anchored.find(id); it != anchored.end()) h = it->second;
      else {
        resolved = false;
        break;
      }
      if (!ctx->host.has_node(h) || !image.insert(h).second ||
          !ctx->host.type_of(h).intersects(x.graph.type_of(n)))
        return std::nullopt;
    }
    if (!resolved) checks.push_back(check_for(v, "ex_" + v, {}, {}));
  }

  std::vector<Production> steps;
  if (c.anchor == Anchor::Post) steps.push_back(*c.rule);
  steps.insert(steps.end(), checks.begin(), checks.end());
  if (c.anchor == Anchor::Pre) steps.push_back(*c.rule);
  if (c.match) binding.insert(c.match->begin(), c.match->end());
  return global_sequence(std::move(steps), std::move(binding));
}

inline bool same_sequence(const CompletedSequence& a, const CompletedSequence& b) {
  return a.steps == b.steps && a.binding == b.binding;
}

inline std::vector<CompletedSequence> compile_fixed(const Condition& c0, const TypedGraph* host,
                                                    const CompileOptions& opt) {
  Condition c = c0;
  if (detail::has_forall(to_tree(c.formula))) {
    if (!host) throw ConditionError("universal quantifiers need a host graph to be closed");
    c = close_all(c, *host, opt);
  }
  std::optional<EvalContext> ctx;
  if (host && (c.anchor == Anchor::None || c.match)) {
    try {
      ctx = context(c, *host);
    } catch (const DanglingEdgeError&) {
      return {};
    }
  }
  ExprPtr tree = to_tree(c.formula);
  std::map<std::string, std::set<std::string>> scope;
  std::vector<std::string> stack;
  scopes(tree, stack, scope);
  std::vector<CompletedSequence> out;
  for (const auto& d : DnfBuilder(c, opt.branch_cap).run(tree)) {
    auto s = disjunct_sequence(c, d, scope, ctx ? &*ctx : nullptr);
    if (!s) continue;
    if (std::none_of(out.begin(), out.end(), [&](const auto& o) { return same_sequence(o, *s); }))
      out.push_back(std::move(*s));
  }
  return out;
}

}  // namespace detail

/// Set of rule sequences equivalent to the condition on `host`: the
/// condition holds iff some sequence is applicable. Check rules come before
/// the rule for preconditions and after it for postconditions (application
/// order). `host` may be null when no universal quantifier needs closing.
inline std::vector<CompletedSequence> compile_to_sequences(const Condition& c0, const TypedGraph* host,
                                                           const CompileOptions& opt = {}) {
  Condition c = normalize(c0);
  const bool universal = detail::has_forall(to_tree(c.formula));
  if (c.anchor == Anchor::None || c.match || !universal) return detail::compile_fixed(c, host, opt);
  if (!host) throw ConditionError("universal quantifiers need a host graph to be closed");
  std::vector<CompletedSequence> out;
  for (const auto& m : find_matches(*c.rule, *host)) {
    Condition at = c;
    at.match = m.node_map;
    try {
      context(at, *host);
    } catch (const DanglingEdgeError&) {
      continue;
    }
    for (auto& s : detail::compile_fixed(at, host, opt)) out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<CompletedSequence> compile_to_sequences(const Condition& c, const TypedGraph& host,
                                                           const CompileOptions& opt = {}) {
  return compile_to_sequences(c, &host, opt);
}

/// The match operator: exists A [A] is the sequence with id_A before the rule
/// (precondition) or after it (postcondition); identifications with the rule
/// become shared node ids.
inline CompletedSequence match_op(const Condition& c0) {
  Condition c = normalize(c0);
  const Formula& f = c.formula;
  if (f.prefix.size() != 1 || f.prefix[0].kind != Quant::Exists || f.matrix->kind != Expr::Kind::Atom ||
      f.matrix->atom.pred != Pred::P || f.matrix->atom.complement || f.matrix->atom.var != f.prefix[0].var)
    throw ConditionError("the match operator needs a formula of the form exists A [A]");
  auto seqs = compile_to_sequences(c, nullptr);
  if (seqs.size() != 1) throw ConditionError("match operator produced no sequence");
  return seqs.front();
}

struct ConditionCheck {
  bool consistent = false;
  bool coherent = false;
  bool compatible = false;
  std::size_t sequences = 0;
};

/// Consistency, coherence and compatibility through the compiled sequences:
/// each holds when it holds for some sequence of the set.
inline ConditionCheck check_condition(const Condition& c, const TypedGraph& host, const CompileOptions& opt = {}) {
  ConditionCheck r;
  auto seqs = compile_to_sequences(c, host, opt);
  r.sequences = seqs.size();
  for (const auto& s : seqs) {
    if (applicable(s, host)) r.consistent = true;
    try {
      auto a = analyze(s);
      r.coherent = r.coherent || a.coherent;
      r.compatible = r.compatible || a.compatible;
    } catch (const TypeClashError&) {
    }
  }
  return r;
}

}  // namespace mgg
