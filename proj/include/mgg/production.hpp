#pragma once

// Grammar rules in static (L, R), dynamic (L, e, r) and environmental
// (L, K, e, r) form, plus direct derivations.

#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mgg/matching.hpp"

namespace mgg {

/// Where the nihilation matrix of a production came from; decides how the
/// invariant check recomputes it.
enum class NihilOrigin {
  Derived,   // K = p(not D) of the rule as written
  Inverted,  // K = e v (not r) K' of the rule this one inverts
  Custom,    // explicitly supplied (check rules)
};

struct Production {
  std::string name;
  TypedGraph lhs;  // L and R share one completed universe
  TypedGraph rhs;
  BoolMatrix e_edges, r_edges;
  BoolVector e_nodes, r_nodes;
  BoolMatrix nihil;  // K
  NihilOrigin origin = NihilOrigin::Derived;

  const Universe& universe() const { return lhs.universe(); }

  /// K as a graph over the rule universe; it is a constraint carrier and need
  /// not be compatible.
  TypedGraph nihil_graph() const { return TypedGraph(nihil, lhs.nodes | rhs.nodes, lhs.typing); }

  /// lambda^r: types of the nodes the rule creates.
  std::map<std::string, TypeSet> added_node_types() const {
    std::map<std::string, TypeSet> out;
    for (std::size_t i = 0; i < r_nodes.size(); ++i)
      if (r_nodes[i]) out.emplace(universe()[i].id, rhs.typing[i]);
    return out;
  }

  bool is_empty() const { return universe().empty(); }
  bool does_nothing() const { return e_edges.is_zero() && r_edges.is_zero() && !norm1(e_nodes) && !norm1(r_nodes); }

  friend bool operator==(const Production& a, const Production& b) {
    return a.name == b.name && a.lhs == b.lhs && a.rhs == b.rhs && a.e_edges == b.e_edges &&
           a.r_edges == b.r_edges && a.e_nodes == b.e_nodes && a.r_nodes == b.r_nodes &&
           a.nihil == b.nihil && a.origin == b.origin;
  }
};

/// K = p(not D) = r v (not e) (not D), with D = (not e^V) (x) (not e^V)^t.
inline BoolMatrix nihilation(const BoolMatrix& e_edges, const BoolMatrix& r_edges,
                             const BoolVector& e_nodes) {
  BoolMatrix d = tensor(~e_nodes, ~e_nodes);
  return r_edges | (~e_edges & ~d);
}

/// Builds a production from its static form. `ident` maps ids of `rhs` (or
/// `lhs`) onto shared ids; elements with equal ids are identified anyway.
inline Production from_static(std::string name, const TypedGraph& lhs, const TypedGraph& rhs,
                              const Identification& ident = {}) {
  auto g = complete({lhs, rhs}, ident);
  Production p;
  p.name = std::move(name);
  p.lhs = std::move(g[0]);
  p.rhs = std::move(g[1]);
  p.e_edges = p.lhs.edges & ~p.rhs.edges;
  p.r_edges = p.rhs.edges & ~p.lhs.edges;
  p.e_nodes = p.lhs.nodes & ~p.rhs.nodes;
  p.r_nodes = p.rhs.nodes & ~p.lhs.nodes;
  p.nihil = nihilation(p.e_edges, p.r_edges, p.e_nodes);
  p.origin = NihilOrigin::Derived;
  return p;
}

/// Rule with L = R = `present` and nihilation `absent`: it only checks.
/// id_A is check_rule(A, 0); the negated identity is
/// check_rule(nodes of A, edges of A).
inline Production check_rule(std::string name, const TypedGraph& present, const BoolMatrix& absent) {
  Production p = from_static(std::move(name), present, present);
  if (!(absent.universe() == p.universe()))
    throw AlignmentError("check rule nihilation must live on the graph's universe");
  p.nihil = absent;
  p.origin = NihilOrigin::Custom;
  return p;
}

inline Production identity_rule(std::string name, const TypedGraph& a) {
  return from_static(std::move(name), a, a);
}

/// Asks for the existence of `a` in the complement of the host.
inline Production negated_identity_rule(std::string name, const TypedGraph& a) {
  return check_rule(std::move(name), nodes_only(a), a.edges);
}

inline std::string inverse_name(const std::string& n) {
  static const std::string suffix = "^-1";
  if (n.size() > suffix.size() && n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0)
    return n.substr(0, n.size() - suffix.size());
  return n + suffix;
}

/// p^-1: L and R swapped, e and r swapped, nihilation Q = e v (not r) K.
inline Production invert(const Production& p) {
  Production q;
  q.name = inverse_name(p.name);
  q.lhs = p.rhs;
  q.rhs = p.lhs;
  q.e_edges = p.r_edges;
  q.r_edges = p.e_edges;
  q.e_nodes = p.r_nodes;
  q.r_nodes = p.e_nodes;
  q.nihil = p.e_edges | (~p.r_edges & p.nihil);
  switch (p.origin) {
    case NihilOrigin::Derived: q.origin = NihilOrigin::Inverted; break;
    case NihilOrigin::Inverted: q.origin = NihilOrigin::Derived; break;
    case NihilOrigin::Custom: q.origin = NihilOrigin::Custom; break;
  }
  return q;
}

/// Violated rule identities, empty when the production is well formed.
inline std::vector<std::string> invariant_violations(const Production& p) {
  std::vector<std::string> out;
  if (!(p.e_edges == (p.lhs.edges & ~p.rhs.edges)) || !(p.e_nodes == (p.lhs.nodes & ~p.rhs.nodes)))
    out.emplace_back("e != L and not R");
  if (!(p.r_edges == (p.rhs.edges & ~p.lhs.edges)) || !(p.r_nodes == (p.rhs.nodes & ~p.lhs.nodes)))
    out.emplace_back("r != R and not L");
  if (!(p.e_edges & p.r_edges).is_zero() || norm1(p.e_nodes & p.r_nodes))
    out.emplace_back("e and r overlap");
  if (!(p.rhs.edges == (p.r_edges | (~p.e_edges & p.lhs.edges))) ||
      !(p.rhs.nodes == (p.r_nodes | (~p.e_nodes & p.lhs.nodes))))
    out.emplace_back("R != r v (not e) L");
  if (p.origin == NihilOrigin::Derived &&
      !(p.nihil == nihilation(p.e_edges, p.r_edges, p.e_nodes)))
    out.emplace_back("K != p(not D)");
  if (p.origin == NihilOrigin::Inverted) {
    // p is q^-1 for q = (R, L); recompute q's K and evolve it.
    BoolMatrix k = nihilation(p.r_edges, p.e_edges, p.r_nodes);
    if (!(p.nihil == (p.r_edges | (~p.e_edges & k)))) out.emplace_back("K != e v (not r) K'");
  }
  return out;
}

/// Renames every universe element of the production.
inline Production rename(const Production& p, const Identification& names) {
  Production q = p;
  q.lhs = rename(p.lhs, names);
  q.rhs = rename(p.rhs, names);
  const Universe& u = q.lhs.universe();
  q.e_edges = embed(p.e_edges, u, names);
  q.r_edges = embed(p.r_edges, u, names);
  q.e_nodes = embed(p.e_nodes, u, names);
  q.r_nodes = embed(p.r_nodes, u, names);
  q.nihil = embed(p.nihil, u, names);
  return q;
}

// ---------------------------------------------------------------------------
// Matching and derivation

/// All m_L in tot(L, g) whose node assignment sends every K-edge into the
/// complement of g; K-edges touching created nodes are vacuous.
inline std::vector<Morphism> find_matches(const Production& p, const TypedGraph& g,
                                          const NodeMap* pins = nullptr) {
  return find_matches(p.lhs, p.nihil, g, pins);
}

inline bool is_match(const Production& p, const TypedGraph& g, const Morphism& m) {
  NodeMap pins = m.node_map;
  if (pins.size() != p.lhs.node_count()) return false;
  for (const auto& id : p.lhs.node_ids())
    if (!pins.count(id)) return false;
  return !find_matches(p, g, &pins).empty();
}

struct DerivationResult {
  TypedGraph before;
  TypedGraph after;
  Morphism match;
  NodeMap comatch;                     // rule element id -> host id for every R node
  std::vector<Production> epsilon_rules;  // applied before the rule itself
};

inline std::string fresh_node_id(const Production& p, std::size_t counter, const std::string& local) {
  return p.name + "#" + std::to_string(counter) + "." + local;
}

/// H = r* v (not e*) G. New nodes get ids derived from (rule name, counter,
/// local id). Throws DanglingEdgeError instead of returning an incompatible
/// graph.
inline DerivationResult apply(const Production& p, const TypedGraph& g, const Morphism& m,
                              std::size_t counter = 0) {
  if (!is_match(p, g, m))
    throw InvalidMatchError("morphism is not a match of rule '" + p.name + "'");

  const Universe& pu = p.universe();
  std::vector<ElemId> ids(g.universe().elements());
  std::vector<TypeSet> typing = g.typing;
  NodeMap comatch;
  std::vector<std::size_t> host_pos(pu.size(), 0);
  for (std::size_t i = 0; i < pu.size(); ++i) {
    const std::string& id = pu[i].id;
    if (p.lhs.nodes[i]) {
      host_pos[i] = g.universe().at(m(id));
    } else if (p.r_nodes[i]) {
      ids.emplace_back(fresh_node_id(p, counter, id), pu[i].display());
      typing.push_back(p.rhs.typing[i]);
      host_pos[i] = ids.size() - 1;
    } else {
      continue;  // padding position: absent in L and R
    }
    if (p.rhs.nodes[i]) comatch.emplace(id, ids[host_pos[i]].id);
  }
  Universe hu(ids);
  BoolMatrix edges = embed(g.edges, hu, {});
  BoolVector nodes = embed(g.nodes, hu, {});
  auto involved = [&](std::size_t i) { return p.lhs.nodes[i] || p.r_nodes[i]; };
  for (std::size_t i = 0; i < pu.size(); ++i) {
    if (!involved(i)) continue;
    if (p.e_nodes[i]) nodes.set(host_pos[i], false);
    if (p.r_nodes[i]) nodes.set(host_pos[i], true);
    for (std::size_t j = 0; j < pu.size(); ++j) {
      if (!involved(j)) continue;
      if (p.e_edges.get(i, j)) edges.set(host_pos[i], host_pos[j], false);
      if (p.r_edges.get(i, j)) edges.set(host_pos[i], host_pos[j], true);
    }
  }
  TypedGraph h(std::move(edges), std::move(nodes), std::move(typing));
  auto dangling = dangling_edges(h);
  if (!dangling.empty()) {
    std::ostringstream os;
    os << "rule '" << p.name << "' leaves dangling edges:";
    for (const auto& [a, b] : dangling) os << " (" << a << "," << b << ")";
    throw DanglingEdgeError(os.str());
  }
  return DerivationResult{g, compact(h), m, std::move(comatch), {}};
}

/// [p, p_eps] in sequence notation (p_eps applied first). p_eps deletes the
/// host edges that would dangle once p removes its nodes; its element ids are
/// host ids. It is the empty rule when nothing would dangle.
inline std::vector<Production> epsilon_expand(const Production& p, const TypedGraph& g,
                                              const Morphism& m) {
  std::set<std::string> doomed;
  for (std::size_t i = 0; i < p.universe().size(); ++i)
    if (p.e_nodes[i]) doomed.insert(m(p.universe()[i].id));
  std::set<Edge> covered;
  for (const auto& [le, he] : m.edge_map) covered.insert(he);

  std::set<std::string> touched;
  std::vector<Edge> extra;
  for (const auto& [a, b] : g.edge_list()) {
    if (!doomed.count(a) && !doomed.count(b)) continue;
    if (covered.count({a, b})) continue;
    extra.emplace_back(a, b);
    touched.insert(a);
    touched.insert(b);
  }
  GraphBuilder lb, rb;
  for (const auto& id : g.node_ids())
    if (touched.count(id)) {
      const auto& e = g.universe()[g.universe().at(id)];
      lb.node(e, g.type_of(id));
      rb.node(e, g.type_of(id));
    }
  for (const auto& [a, b] : extra) lb.edge(a, b);
  return {p, from_static(p.name + "_eps", lb.build(), rb.build())};
}

inline Morphism identity_match(const Production& p) {
  Morphism m;
  for (const auto& id : p.lhs.node_ids()) m.node_map.emplace(id, id);
  return m;
}

/// Applies p_eps (when non-empty) and then p.
inline DerivationResult apply_with_epsilon(const Production& p, const TypedGraph& g,
                                           const Morphism& m, std::size_t counter = 0) {
  auto rules = epsilon_expand(p, g, m);
  const Production& eps = rules[1];
  if (eps.lhs.edge_count() == 0) return apply(p, g, m, counter);
  TypedGraph mid = apply(eps, g, identity_match(eps), counter).after;
  // Deleting edges keeps every node, so the match stays valid on `mid`;
  // recompute its edge map there.
  Morphism m2 = find_matches(p, mid, &m.node_map).at(0);
  DerivationResult r = apply(p, mid, m2, counter);
  r.before = g;
  r.match = m;
  r.epsilon_rules.push_back(eps);
  return r;
}

// ---------------------------------------------------------------------------
// Marking

/// A node of one rule in a list: (rule index, element id).
using RuleNode = std::pair<std::size_t, std::string>;

/// Renames each group of shared nodes to one common id ("mu<k>") so that
/// any joint match sends the group to a single host node.
inline std::vector<Production> mark(const std::vector<Production>& rules,
                                    const std::vector<std::vector<RuleNode>>& shared) {
  std::vector<Identification> names(rules.size());
  for (std::size_t k = 0; k < shared.size(); ++k) {
    const std::string mu = "mu" + std::to_string(k);
    std::optional<TypeSet> meet;
    for (const auto& [ri, id] : shared[k]) {
      if (ri >= rules.size()) throw InputError("marking refers to a missing rule");
      const Production& p = rules[ri];
      if (!p.lhs.has_node(id))
        throw InputError("marked node '" + id + "' is not in the LHS of '" + p.name + "'");
      const TypeSet& t = p.lhs.type_of(id);
      meet = meet ? type_meet(*meet, t) : t;
      names[ri][id] = mu;
    }
  }
  std::vector<Production> out;
  for (std::size_t i = 0; i < rules.size(); ++i) out.push_back(rename(rules[i], names[i]));
  return out;
}

/// Matches of all rules in the same host that agree on common element ids.
/// Each result maps every LHS id of every rule to a host node.
inline std::vector<NodeMap> joint_matches(const std::vector<Production>& rules, const TypedGraph& g) {
  std::vector<NodeMap> out;
  std::function<void(std::size_t, const NodeMap&)> go = [&](std::size_t i, const NodeMap& bound) {
    if (i == rules.size()) {
      out.push_back(bound);
      return;
    }
    for (const auto& m : find_matches(rules[i], g, &bound)) {
      NodeMap next = bound;
      next.insert(m.node_map.begin(), m.node_map.end());
      go(i + 1, next);
    }
  };
  go(0, {});
  return out;
}

}  // namespace mgg
