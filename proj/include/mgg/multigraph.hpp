#pragma once

// Multidigraphs on top of simple digraphs. Every multigraph edge becomes a
// multinode with one edge in from its source and one edge out to its target.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/transport.hpp"

namespace mgg {

inline const std::string kMultinodeType = "$multinode";

struct MultiNode {
  std::string id;
  TypeSet type;

  friend bool operator==(const MultiNode&, const MultiNode&) = default;
};

struct MultiEdge {
  std::string id;
  std::string source;
  std::string target;

  friend bool operator==(const MultiEdge&, const MultiEdge&) = default;
};

/// M = (V, E, s, t). Parallel edges and self-loops are allowed.
struct MultiGraph {
  std::vector<MultiNode> nodes;
  std::vector<MultiEdge> edges;

  MultiGraph& node(std::string id, TypeSet t) {
    nodes.push_back({std::move(id), std::move(t)});
    return *this;
  }
  MultiGraph& edge(std::string id, std::string s, std::string t) {
    edges.push_back({std::move(id), std::move(s), std::move(t)});
    return *this;
  }
  const MultiNode* find_node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
  const MultiEdge* find_edge(const std::string& id) const {
    for (const auto& e : edges)
      if (e.id == id) return &e;
    return nullptr;
  }
  /// Number of edges from s to t.
  std::size_t multiplicity(const std::string& s, const std::string& t) const {
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [&](const MultiEdge& e) { return e.source == s && e.target == t; }));
  }

  friend bool operator==(const MultiGraph&, const MultiGraph&) = default;
};

/// Throws MultigraphError on duplicate ids, dangling edges or reserved types.
inline void validate(const MultiGraph& m) {
  std::set<std::string> ids;
  for (const auto& n : m.nodes) {
    if (n.id.empty()) throw MultigraphError("node without an id");
    if (n.id.find('>') != std::string::npos || n.id.front() == '@')
      throw MultigraphError("node id '" + n.id + "' uses a reserved character");
    if (n.type.contains(kMultinodeType)) throw MultigraphError("node '" + n.id + "' uses the multinode type");
    if (!ids.insert(n.id).second) throw MultigraphError("duplicate node '" + n.id + "'");
  }
  std::set<std::string> eids;
  for (const auto& e : m.edges) {
    if (e.id.empty()) throw MultigraphError("edge without an id");
    if (!eids.insert(e.id).second) throw MultigraphError("duplicate edge '" + e.id + "'");
    if (!ids.count(e.source) || !ids.count(e.target))
      throw MultigraphError("edge '" + e.id + "' refers to an unknown node");
  }
}

inline bool is_multinode(const TypedGraph& g, const std::string& id) {
  return g.type_of(id).contains(kMultinodeType);
}

namespace detail {

inline std::string multinode_id(const std::string& s, const std::string& t, std::size_t k) {
  return s + ">" + t + "#" + std::to_string(k);
}

/// Encodes with some multinode ids fixed in advance (edge id -> node id);
/// the others get the next free ordinal for their endpoint pair.
inline TypedGraph encode_with(const MultiGraph& m, const std::map<std::string, std::string>& fixed) {
  validate(m);
  GraphBuilder b;
  for (const auto& n : m.nodes) b.node(n.id, n.type);
  std::set<std::string> taken;
  for (const auto& e : m.edges)
    if (auto it = fixed.find(e.id); it != fixed.end()) taken.insert(it->second);
  std::map<Edge, std::size_t> next;
  for (const auto& e : m.edges) {
    std::string id;
    if (auto it = fixed.find(e.id); it != fixed.end()) {
      id = it->second;
    } else {
      std::size_t& k = next[{e.source, e.target}];
      do id = multinode_id(e.source, e.target, ++k);
      while (taken.count(id));
      taken.insert(id);
    }
    b.node(ElemId(id, e.id), kMultinodeType);
    b.edge(e.source, id);
    b.edge(id, e.target);
  }
  return b.build();
}

}  // namespace detail

/// Simple digraph with one multinode per edge: source -> multinode ->
/// target. Multinode ids are "<source>><target>#<k>", labelled with the
/// edge id.
inline TypedGraph encode(const MultiGraph& m) { return detail::encode_with(m, {}); }

/// Every simple type found in g.
inline std::set<std::string> simple_types(const TypedGraph& g) {
  std::set<std::string> out;
  for (const auto& id : g.node_ids())
    for (const auto& t : g.type_of(id).types())
      if (t != kMultinodeType) out.insert(t);
  return out;
}

/// Forbidden adjacencies as a graph constraint: no edge between two simple
/// nodes or two multinodes, self-loops included. Simple nodes are variable
/// nodes over `simple`.
inline Condition mc_constraint(const std::set<std::string>& simple) {
  Condition c;
  std::vector<std::string> parts;
  auto add = [&](const std::string& name, const TypeSet& t, bool loop) {
    GraphBuilder b;
    b.node("x", t);
    if (loop) {
      b.edge("x", "x");
    } else {
      b.node("y", t).edge("x", "y");
    }
    c.graphs.emplace_back(name, b.build());
    parts.push_back("forall " + name + " [!Q(" + name + ")]");
  };
  if (!simple.empty()) {
    TypeSet t(simple);
    add("A0", t, false);
    add("A0s", t, true);
  }
  add("A1", kMultinodeType, false);
  add("A1s", kMultinodeType, true);
  std::string f = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) f += (i ? " & " : "") + parts[i];
  c.formula = parse_formula(f + "]");
  return c;
}

struct McReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Checks both multigraph conditions. Alternation goes through the
/// constraint evaluator; the one-in/one-out rule for multinodes is checked
/// directly.
inline McReport check_mc(const TypedGraph& g) {
  McReport r;
  const auto ids = g.node_ids();
  for (const auto& id : ids)
    if (is_multinode(g, id) && !g.type_of(id).is_fixed())
      r.violations.push_back("node " + id + " mixes the multinode type with simple types");
  if (!r.violations.empty()) {
    r.ok = false;
    return r;
  }
  if (!satisfies(g, mc_constraint(simple_types(g)))) {
    for (const auto& [a, b] : g.edge_list())
      if (is_multinode(g, a) == is_multinode(g, b))
        r.violations.push_back(std::string("edge ") + a + "->" + b + " joins two " +
                               (is_multinode(g, a) ? "multinodes" : "simple nodes"));
  }
  for (const auto& id : ids) {
    if (!is_multinode(g, id)) continue;
    std::size_t in = 0, out = 0;
    for (const auto& o : ids) {
      if (is_multinode(g, o)) continue;
      in += g.has_edge(o, id);
      out += g.has_edge(id, o);
    }
    if (in != 1) r.violations.push_back("multinode " + id + " has " + std::to_string(in) + " sources");
    if (out != 1) r.violations.push_back("multinode " + id + " has " + std::to_string(out) + " targets");
  }
  r.ok = r.violations.empty();
  return r;
}

/// Inverse of encode. Edge ids are the multinode labels, or the multinode
/// ids where labels clash.
inline MultiGraph decode(const TypedGraph& g) {
  McReport r = check_mc(g);
  if (!r.ok) throw MultigraphError("not a multigraph encoding: " + r.violations.front());
  MultiGraph m;
  const auto ids = g.node_ids();
  std::map<std::string, int> labels;
  for (const auto& id : ids)
    if (is_multinode(g, id)) ++labels[g.universe()[g.universe().at(id)].display()];
  for (const auto& id : ids)
    if (!is_multinode(g, id)) m.node(id, g.type_of(id));
  for (const auto& id : ids) {
    if (!is_multinode(g, id)) continue;
    std::string s, t;
    for (const auto& o : ids) {
      if (is_multinode(g, o)) continue;
      if (g.has_edge(o, id)) s = o;
      if (g.has_edge(id, o)) t = o;
    }
    const std::string& label = g.universe()[g.universe().at(id)].display();
    m.edge(labels[label] == 1 ? label : id, s, t);
  }
  return m;
}

/// Rule between multigraphs. Nodes and edges are identified by id across
/// the two sides.
struct MultiRule {
  std::string name;
  MultiGraph lhs;
  MultiGraph rhs;

  friend bool operator==(const MultiRule&, const MultiRule&) = default;
};

/// Encoded production with the multigraph constraint attached as pre- and
/// postcondition.
struct LiftedRule {
  Production production;
  Condition pre;
  Condition post;
};

/// Encodes both sides. An edge kept by the rule keeps its multinode, a
/// deleted edge becomes a deleted multinode and an added edge an added one.
/// `simple` lists the simple types of the grammar; by default the types the
/// rule mentions.
inline LiftedRule lift_rule(const MultiRule& r, std::set<std::string> simple = {}) {
  validate(r.lhs);
  validate(r.rhs);
  for (const auto& e : r.rhs.edges) {
    const MultiEdge* old = r.lhs.find_edge(e.id);
    if (old && (old->source != e.source || old->target != e.target))
      throw MultigraphError("rule '" + r.name + "' moves edge '" + e.id + "'");
  }
  TypedGraph l = encode(r.lhs);
  std::map<std::string, std::string> fixed;
  for (const auto& e : r.rhs.edges) {
    if (!r.lhs.find_edge(e.id)) continue;
    for (const auto& id : l.node_ids())
      if (is_multinode(l, id) && l.universe()[l.universe().at(id)].label == e.id) fixed.emplace(e.id, id);
  }
  TypedGraph rg = detail::encode_with(r.rhs, fixed);
  LiftedRule out;
  out.production = from_static(r.name, l, rg);
  if (simple.empty()) {
    for (const auto* side : {&l, &rg})
      for (const auto& t : simple_types(*side)) simple.insert(t);
  }
  const Condition mc = mc_constraint(simple);
  const CompletedSequence s = global_sequence({out.production});
  out.pre = delocalize(mc, s, 0, 0);
  out.post = delocalize(mc, s, 1, 0);
  return out;
}

/// The auxiliary rules that clear multinodes left behind by a deleted
/// simple node, and the chain that runs them before the rule.
struct XiExpansion {
  Production xi;       // deletes the edges around those multinodes
  Production epsilon;  // deletes the multinodes themselves
  CompletedSequence sequence;
};

/// Expands p at match m in the encoded host g. Multinodes outside the match
/// that touch a simple node p deletes are removed in advance: first their
/// edges (xi), then the nodes (epsilon). With `fused` the two are one rule,
/// returned as `epsilon`, and `xi` is empty.
inline XiExpansion xi_expand(const Production& p, const TypedGraph& g, const Morphism& m, bool fused = false) {
  std::set<std::string> image, doomed;
  NodeMap preimage;
  for (const auto& [x, h] : m.node_map) {
    image.insert(h);
    preimage.emplace(h, x);
  }
  for (std::size_t i = 0; i < p.universe().size(); ++i) {
    const std::string& x = p.universe()[i].id;
    if (p.e_nodes[i] && !p.lhs.typing[i].contains(kMultinodeType)) doomed.insert(m(x));
  }
  std::set<std::string> loose;  // multinodes to clear
  for (const auto& h : g.node_ids()) {
    if (!is_multinode(g, h) || image.count(h)) continue;
    for (const auto& d : doomed)
      if (g.has_edge(h, d) || g.has_edge(d, h)) loose.insert(h);
  }
  std::set<std::string> around;
  std::vector<Edge> edges;
  for (const auto& [a, b] : g.edge_list())
    if (loose.count(a) || loose.count(b)) {
      edges.emplace_back(a, b);
      around.insert(a);
      around.insert(b);
    }
  NodeMap binding = m.node_map;
  auto local = [&](const std::string& h) {
    auto it = preimage.find(h);
    std::string id = it != preimage.end() ? it->second : "@" + h;
    binding.emplace(id, h);
    return id;
  };
  GraphBuilder xl, xr, el, fr;
  for (const auto& h : g.node_ids()) {
    if (!around.count(h)) continue;
    const std::string id = local(h);
    const ElemId e(id, g.universe()[g.universe().at(h)].label);
    xl.node(e, g.type_of(h));
    xr.node(e, g.type_of(h));
    if (loose.count(h)) el.node(e, g.type_of(h));
    else fr.node(e, g.type_of(h));
  }
  for (const auto& [a, b] : edges) xl.edge(local(a), local(b));
  XiExpansion out;
  if (fused) {
    out.xi = from_static(p.name + "_xi", GraphBuilder().build(), GraphBuilder().build());
    out.epsilon = from_static(p.name + "_eps", xl.build(), fr.build());
  } else {
    out.xi = from_static(p.name + "_xi", xl.build(), xr.build());
    out.epsilon = from_static(p.name + "_eps", el.build(), GraphBuilder().build());
  }
  std::vector<Production> steps;
  if (!out.xi.is_empty()) steps.push_back(out.xi);
  if (!out.epsilon.is_empty()) steps.push_back(out.epsilon);
  steps.push_back(p);
  out.sequence = global_sequence(std::move(steps), std::move(binding));
  return out;
}

}  // namespace mgg
