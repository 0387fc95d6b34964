#pragma once

// Diagrams of graphs related by partial injective morphisms, and the
// conditions (graph constraints and application conditions) built on them.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/formula.hpp"
#include "mgg/production.hpp"

namespace mgg {

enum class Anchor { None, Pre, Post };

inline const char* to_string(Anchor a) {
  switch (a) {
    case Anchor::None: return "none";
    case Anchor::Pre: return "pre";
    case Anchor::Post: return "post";
  }
  return "";
}

/// Name of the rule side an application condition hangs from.
inline std::string side_name(Anchor a) { return a == Anchor::Post ? "R" : "L"; }

struct DiagramGraph {
  std::string base;
  std::vector<int> replica;  // indices appended by closure
  std::string piece;         // edge tag appended by decomposition
  TypedGraph graph;          // certainty part: nodes and edges that must be there
  BoolMatrix nihil;          // edges that must be absent, over graph's universe
  std::optional<NodeMap> pin;  // fixed image in the host
  bool anchor = false;       // the rule's own L/K or R/Q, bound to the match

  DiagramGraph() = default;
  DiagramGraph(std::string name, TypedGraph g)
      : base(std::move(name)), graph(std::move(g)), nihil(graph.universe()) {}

  std::string name() const {
    std::string s = base;
    for (int i : replica) s += "." + std::to_string(i);
    if (!piece.empty()) s += "/" + piece;
    return s;
  }

  friend bool operator==(const DiagramGraph& a, const DiagramGraph& b) {
    return a.name() == b.name() && a.graph == b.graph && a.nihil == b.nihil && a.pin == b.pin &&
           a.anchor == b.anchor;
  }
};

struct DiagramMorphism {
  std::string from;
  std::string to;
  NodeMap map;  // node of `from` -> node of `to`

  friend bool operator==(const DiagramMorphism&, const DiagramMorphism&) = default;
  friend auto operator<=>(const DiagramMorphism&, const DiagramMorphism&) = default;
};

struct Condition {
  std::vector<DiagramGraph> graphs;
  std::vector<DiagramMorphism> morphisms;
  Formula formula;
  Anchor anchor = Anchor::None;
  std::optional<Production> rule;
  /// Fixed match of the rule's LHS in the initial host.
  std::optional<NodeMap> match;

  const DiagramGraph* find(const std::string& name) const {
    for (const auto& g : graphs)
      if (g.name() == name) return &g;
    return nullptr;
  }
  const DiagramGraph& graph(const std::string& name) const {
    if (const auto* g = find(name)) return *g;
    throw ConditionError("unknown diagram graph '" + name + "'");
  }
  bool is_side(const std::string& name) const {
    return anchor != Anchor::None && name == side_name(anchor) && !find(name);
  }
  /// The graph the rule side stands for: L for preconditions, R for
  /// postconditions.
  TypedGraph side_graph() const {
    if (!rule) throw ConditionError("application condition without a rule");
    return compact(anchor == Anchor::Post ? rule->rhs : rule->lhs);
  }
  /// Nodes of a named graph, or of the rule side.
  TypedGraph nodes_of(const std::string& name) const {
    if (is_side(name)) return side_graph();
    return graph(name).graph;
  }
};

// ---------------------------------------------------------------------------
// Well-definedness

namespace detail {

/// Union-find over (graph name, node id).
class NodeClasses {
public:
  using Key = std::pair<std::string, std::string>;

  Key find(const Key& k) {
    auto it = parent_.find(k);
    if (it == parent_.end()) {
      parent_.emplace(k, k);
      return k;
    }
    if (it->second == k) return k;
    Key root = find(it->second);
    parent_[k] = root;
    return root;
  }
  void unite(const Key& a, const Key& b) {
    Key ra = find(a), rb = find(b);
    if (ra != rb) parent_[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::map<Key, std::vector<Key>> classes() {
    std::map<Key, std::vector<Key>> out;
    std::vector<Key> keys;
    for (const auto& [k, v] : parent_) keys.push_back(k);
    for (const auto& k : keys) out[find(k)].push_back(k);
    return out;
  }

private:
  std::map<Key, Key> parent_;
};

inline bool reserved_char(char ch) { return ch == '.' || ch == '/' || ch == '>' || ch == '?' || ch == '@'; }

}  // namespace detail

/// Throws ConditionError when the diagram or formula is malformed: unknown
/// or duplicate names, morphisms that are not partial injective and
/// type-compatible, morphisms into the rule side, cycles that do not commute,
/// unbound or doubly bound variables.
inline void validate(const Condition& c) {
  std::set<std::string> names;
  for (const auto& g : c.graphs) {
    if (g.base.empty()) throw ConditionError("diagram graph without a name");
    if (std::any_of(g.base.begin(), g.base.end(), detail::reserved_char))
      throw ConditionError("graph name '" + g.base + "' uses a reserved character");
    if (!names.insert(g.name()).second) throw ConditionError("duplicate diagram graph '" + g.name() + "'");
    if (!(g.nihil.universe() == g.graph.universe()))
      throw ConditionError("nihil part of '" + g.name() + "' must share its universe");
    if (g.anchor && c.anchor == Anchor::None)
      throw ConditionError("anchor graph '" + g.name() + "' in a graph constraint");
    if (c.anchor != Anchor::None && g.name() == side_name(c.anchor) && !g.anchor)
      throw ConditionError("'" + g.name() + "' is reserved for the rule side");
  }
  if (c.anchor != Anchor::None && !c.rule) throw ConditionError("application condition without a rule");
  if (c.anchor == Anchor::None && c.match) throw ConditionError("graph constraint with a match");

  for (const auto& d : c.morphisms) {
    const bool from_side = c.is_side(d.from);
    if (!from_side && !c.find(d.from)) throw ConditionError("morphism from unknown graph '" + d.from + "'");
    if (!c.find(d.to)) throw ConditionError("morphism to unknown graph '" + d.to + "'");
    if (c.is_side(d.to) || c.graph(d.to).anchor)
      throw ConditionError("morphism " + d.from + "->" + d.to + " has the rule side as codomain");
    if (d.from == d.to) throw ConditionError("morphism from '" + d.from + "' to itself");
    TypedGraph src = c.nodes_of(d.from);
    const TypedGraph& dst = c.graph(d.to).graph;
    std::set<std::string> image;
    for (const auto& [a, b] : d.map) {
      if (!src.has_node(a)) throw ConditionError("morphism " + d.from + "->" + d.to + ": no node '" + a + "'");
      if (!dst.has_node(b)) throw ConditionError("morphism " + d.from + "->" + d.to + ": no node '" + b + "'");
      if (!image.insert(b).second) throw ConditionError("morphism " + d.from + "->" + d.to + " is not injective");
      if (!src.type_of(a).intersects(dst.type_of(b)))
        throw ConditionError("morphism " + d.from + "->" + d.to + " relates nodes of unrelated types");
    }
  }

  // Injective morphisms commute around every cycle exactly when no graph
  // gets two of its own nodes identified.
  detail::NodeClasses uf;
  for (const auto& d : c.morphisms)
    for (const auto& [a, b] : d.map) uf.unite({d.from, a}, {d.to, b});
  for (const auto& [root, members] : uf.classes()) {
    std::set<std::string> seen;
    for (const auto& [g, n] : members)
      if (!seen.insert(g).second) throw ConditionError("diagram morphisms do not commute around '" + g + "'");
  }

  std::set<std::string> bound;
  for (const auto& q : c.formula.prefix)
    if (!bound.insert(q.var).second) throw ConditionError("variable '" + q.var + "' quantified twice");
  std::set<std::string> nested;
  collect_bound(c.formula.matrix, nested);
  for (const auto& v : nested)
    if (!bound.insert(v).second) throw ConditionError("variable '" + v + "' quantified twice");
  for (const auto& v : bound)
    if (!c.find(v)) throw ConditionError("formula quantifies unknown graph '" + v + "'");
  std::set<std::string> used;
  collect_vars(c.formula.matrix, used);
  for (const auto& v : used)
    if (!bound.count(v)) throw ConditionError("unbound variable '" + v + "'");
}

/// Adds the composite morphisms implied by the diagram: any two graphs whose
/// nodes are related through a chain of morphisms get a direct morphism.
inline Condition materialize(const Condition& c) {
  detail::NodeClasses uf;
  for (const auto& d : c.morphisms)
    for (const auto& [a, b] : d.map) uf.unite({d.from, a}, {d.to, b});

  std::vector<std::string> order;
  if (c.anchor != Anchor::None && !c.find(side_name(c.anchor))) order.push_back(side_name(c.anchor));
  for (const auto& g : c.graphs) order.push_back(g.name());
  auto rank = [&](const std::string& n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
  auto fixed = [&](const std::string& n) { return c.is_side(n) || c.graph(n).anchor; };

  Condition out = c;
  auto morphism = [&](const std::string& x, const std::string& y) -> DiagramMorphism* {
    for (auto& d : out.morphisms)
      if (d.from == x && d.to == y) return &d;
    return nullptr;
  };
  for (const auto& [root, members] : uf.classes())
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        auto [gx, nx] = members[i];
        auto [gy, ny] = members[j];
        if (gx == gy || (fixed(gx) && fixed(gy))) continue;
        if (fixed(gy) || (!fixed(gx) && rank(gx) > rank(gy))) {
          std::swap(gx, gy);
          std::swap(nx, ny);
        }
        if (auto* d = morphism(gx, gy)) {
          d->map.emplace(nx, ny);
        } else if (auto* r = fixed(gx) ? nullptr : morphism(gy, gx)) {
          r->map.emplace(ny, nx);
        } else {
          out.morphisms.push_back({gx, gy, {{nx, ny}}});
        }
      }
  return out;
}

// ---------------------------------------------------------------------------
// Structural comparison

namespace detail {

/// Matrix with And/Or children flattened and sorted, so that formulas that
/// differ only in operand order compare equal.
inline ExprPtr canonical(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Const:
    case Expr::Kind::Atom: return e;
    case Expr::Kind::Not: return negate(canonical(e->args[0]));
    case Expr::Kind::Implies: return implies(canonical(e->args[0]), canonical(e->args[1]));
    case Expr::Kind::Exists:
    case Expr::Kind::Forall:
      return quantified(e->kind == Expr::Kind::Forall, e->var, canonical(e->args[0]));
    case Expr::Kind::And:
    case Expr::Kind::Or: {
      std::vector<ExprPtr> kids;
      for (const auto& a : e->args) {
        ExprPtr k = canonical(a);
        if (k->kind == e->kind)
          kids.insert(kids.end(), k->args.begin(), k->args.end());
        else
          kids.push_back(k);
      }
      std::sort(kids.begin(), kids.end(),
                [](const ExprPtr& a, const ExprPtr& b) { return to_string(a) < to_string(b); });
      return nary(e->kind, std::move(kids));
    }
  }
  return e;
}

}  // namespace detail

/// Same graphs (by name), same morphisms, same quantifier kinds per variable
/// and the same matrix up to operand order.
inline bool structurally_equal(const Condition& a, const Condition& b) {
  if (a.anchor != b.anchor) return false;
  auto by_name = [](const Condition& c) {
    std::map<std::string, const DiagramGraph*> m;
    for (const auto& g : c.graphs) m[g.name()] = &g;
    return m;
  };
  auto ga = by_name(a), gb = by_name(b);
  if (ga.size() != gb.size()) return false;
  for (const auto& [n, g] : ga) {
    auto it = gb.find(n);
    if (it == gb.end() || !(*g == *it->second)) return false;
  }
  auto ma = a.morphisms, mb = b.morphisms;
  std::sort(ma.begin(), ma.end());
  std::sort(mb.begin(), mb.end());
  if (ma != mb) return false;
  std::map<std::string, Quant> pa, pb;
  for (const auto& q : a.formula.prefix) pa[q.var] = q.kind;
  for (const auto& q : b.formula.prefix) pb[q.var] = q.kind;
  if (pa != pb) return false;
  return equal(detail::canonical(a.formula.matrix), detail::canonical(b.formula.matrix));
}

// ---------------------------------------------------------------------------
// Printing

inline std::string to_string(const DiagramGraph& g) {
  std::string s = g.name() + ":";
  for (const auto& id : g.graph.node_ids()) s += " " + id + ":" + g.graph.type_of(id).to_string();
  s += " |";
  for (const auto& [a, b] : g.graph.edge_list()) s += " " + a + ">" + b;
  if (!g.nihil.is_zero()) {
    s += " | not";
    for (auto [i, j] : g.nihil.entries())
      s += " " + g.graph.universe()[i].id + ">" + g.graph.universe()[j].id;
  }
  if (g.pin) {
    s += " | at";
    for (const auto& [a, b] : *g.pin) s += " " + a + "=" + b;
  }
  if (g.anchor) s += " | anchor";
  return s;
}

inline std::string to_string(const Condition& c) {
  std::string s = std::string("anchor: ") + to_string(c.anchor) + "\n";
  if (c.rule) s += "rule: " + c.rule->name + "\n";
  for (const auto& g : c.graphs) s += "graph " + to_string(g) + "\n";
  for (const auto& d : c.morphisms) {
    s += "morphism " + d.from + " -> " + d.to + ":";
    for (const auto& [a, b] : d.map) s += " " + a + "=" + b;
    s += "\n";
  }
  return s + "formula: " + to_string(c.formula) + "\n";
}

}  // namespace mgg
