#pragma once

// Typed simple digraphs G = (M, V, lambda) over a named universe.

#include <algorithm>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/bool_matrix.hpp"

namespace mgg {

/// Non-empty set of type names. A fixed-type node is the singleton case.
class TypeSet {
public:
  TypeSet() = delete;
  TypeSet(std::string single) : types_{std::move(single)} {}  // NOLINT(google-explicit-constructor)
  TypeSet(const char* single) : types_{single} {}              // NOLINT(google-explicit-constructor)
  TypeSet(std::initializer_list<std::string> ts) : types_(ts) { check(); }
  explicit TypeSet(std::set<std::string> ts) : types_(std::move(ts)) { check(); }

  const std::set<std::string>& types() const { return types_; }
  bool contains(const std::string& t) const { return types_.count(t) != 0; }
  bool is_fixed() const { return types_.size() == 1; }
  bool intersects(const TypeSet& o) const {
    return std::any_of(types_.begin(), types_.end(), [&](const auto& t) { return o.contains(t); });
  }
  std::string to_string() const {
    std::string s;
    for (const auto& t : types_) s += (s.empty() ? "" : "|") + t;
    return s;
  }

  friend bool operator==(const TypeSet&, const TypeSet&) = default;
  friend auto operator<=>(const TypeSet&, const TypeSet&) = default;

private:
  void check() const {
    if (types_.empty()) throw TypeClashError("a node must carry at least one type");
  }
  std::set<std::string> types_;
};

/// Intersection of two type sets; an empty result is not allowed.
inline TypeSet type_meet(const TypeSet& a, const TypeSet& b) {
  std::set<std::string> out;
  std::set_intersection(a.types().begin(), a.types().end(), b.types().begin(), b.types().end(),
                        std::inserter(out, out.end()));
  if (out.empty())
    throw TypeClashError("operation not allowed: types {" + a.to_string() + "} and {" +
                         b.to_string() + "} do not intersect");
  return TypeSet(std::move(out));
}

using Edge = std::pair<std::string, std::string>;

struct TypedGraph {
  BoolMatrix edges;
  BoolVector nodes;
  std::vector<TypeSet> typing;  // indexed like the universe

  TypedGraph() = default;
  TypedGraph(BoolMatrix m, BoolVector v, std::vector<TypeSet> t)
      : edges(std::move(m)), nodes(std::move(v)), typing(std::move(t)) {
    if (!(edges.universe() == nodes.universe()))
      throw AlignmentError("edge matrix and node vector must share a universe");
    if (typing.size() != nodes.size()) throw AlignmentError("typing must cover the universe");
  }

  const Universe& universe() const { return nodes.universe(); }
  std::size_t size() const { return nodes.size(); }

  bool has_node(const std::string& id) const {
    auto i = universe().find(id);
    return i && nodes[*i];
  }
  bool has_edge(const std::string& a, const std::string& b) const {
    auto i = universe().find(a);
    auto j = universe().find(b);
    return i && j && edges.get(*i, *j);
  }
  const TypeSet& type_of(const std::string& id) const { return typing[universe().at(id)]; }

  /// Ids of present nodes, universe order.
  std::vector<std::string> node_ids() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (nodes[i]) out.push_back(universe()[i].id);
    return out;
  }
  std::vector<Edge> edge_list() const {
    std::vector<Edge> out;
    for (auto [i, j] : edges.entries()) out.emplace_back(universe()[i].id, universe()[j].id);
    return out;
  }
  std::size_t node_count() const { return nodes.count(); }
  std::size_t edge_count() const { return edges.count(); }

  friend bool operator==(const TypedGraph& a, const TypedGraph& b) {
    return a.edges == b.edges && a.nodes == b.nodes && a.typing == b.typing;
  }
};

/// Incremental construction of a TypedGraph; nodes keep insertion order.
class GraphBuilder {
public:
  GraphBuilder& node(ElemId id, TypeSet types, bool present = true) {
    auto it = std::find_if(ids_.begin(), ids_.end(), [&](const ElemId& e) { return e == id; });
    if (it != ids_.end()) throw InputError("duplicate node '" + id.id + "'");
    ids_.push_back(std::move(id));
    types_.push_back(std::move(types));
    present_.push_back(present);
    return *this;
  }
  GraphBuilder& edge(const std::string& a, const std::string& b) {
    edges_.emplace_back(a, b);
    return *this;
  }
  TypedGraph build() const {
    Universe u(ids_);
    BoolMatrix m(u);
    BoolVector v(u);
    for (std::size_t i = 0; i < ids_.size(); ++i) v.set(i, present_[i]);
    for (const auto& [a, b] : edges_) {
      if (!u.contains(a) || !u.contains(b))
        throw InputError("edge (" + a + "," + b + ") refers to an unknown node");
      m.set(a, b);
    }
    return TypedGraph(std::move(m), std::move(v), types_);
  }

private:
  std::vector<ElemId> ids_;
  std::vector<TypeSet> types_;
  std::vector<bool> present_;
  std::vector<Edge> edges_;
};

/// Edges whose source or target node bit is 0.
inline std::vector<Edge> dangling_edges(const TypedGraph& g) {
  std::vector<Edge> out;
  for (auto [i, j] : g.edges.entries())
    if (!g.nodes[i] || !g.nodes[j]) out.emplace_back(g.universe()[i].id, g.universe()[j].id);
  return out;
}

/// || (M v M^t) (.) not V ||_1 == 0
inline bool compatible(const TypedGraph& g) {
  return !norm1(bool_product(g.edges | transpose(g.edges), ~g.nodes));
}

/// Negation acts on edges only.
inline TypedGraph complement_edges(const TypedGraph& g) {
  return TypedGraph(~g.edges, g.nodes, g.typing);
}

/// Aligns graphs onto one universe. Merged positions get the meet of their
/// types; padded positions are absent nodes.
inline std::vector<TypedGraph> complete(const std::vector<TypedGraph>& graphs,
                                        const Identification& ident = {}) {
  std::vector<const Universe*> parts;
  for (const auto& g : graphs) parts.push_back(&g.universe());
  Universe u = completed_universe(parts, ident);
  std::vector<std::optional<TypeSet>> types(u.size());
  for (const auto& g : graphs)
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::size_t k = u.at(canonical_id(ident, g.universe()[i].id));
      types[k] = types[k] ? type_meet(*types[k], g.typing[i]) : g.typing[i];
    }
  std::vector<TypeSet> typing;
  for (auto& t : types) typing.push_back(*t);
  std::vector<TypedGraph> out;
  for (const auto& g : graphs)
    out.emplace_back(embed(g.edges, u, ident), embed(g.nodes, u, ident), typing);
  return out;
}

/// Same graph with its universe grown to `target` (which must contain it).
inline TypedGraph extend_to(const TypedGraph& g, const Universe& target,
                            const std::vector<TypeSet>& target_typing) {
  std::vector<TypeSet> typing = target_typing;
  for (std::size_t i = 0; i < g.size(); ++i) typing[target.at(g.universe()[i].id)] = g.typing[i];
  return TypedGraph(embed(g.edges, target, {}), embed(g.nodes, target, {}), std::move(typing));
}

/// Renames universe elements; ids missing from `names` are kept.
inline TypedGraph rename(const TypedGraph& g, const Identification& names) {
  std::vector<ElemId> ids;
  for (const auto& e : g.universe()) ids.emplace_back(canonical_id(names, e.id), e.label);
  Universe u(std::move(ids));
  return TypedGraph(embed(g.edges, u, names), embed(g.nodes, u, names), g.typing);
}

/// Drops absent nodes (and any edge touching them).
inline TypedGraph compact(const TypedGraph& g) {
  GraphBuilder b;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.nodes[i]) b.node(g.universe()[i], g.typing[i]);
  for (auto [i, j] : g.edges.entries())
    if (g.nodes[i] && g.nodes[j]) b.edge(g.universe()[i].id, g.universe()[j].id);
  return b.build();
}

/// Subgraph induced on `keep` (ids), edges restricted accordingly.
inline TypedGraph restrict_to(const TypedGraph& g, const std::set<std::string>& keep) {
  GraphBuilder b;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (keep.count(g.universe()[i].id)) b.node(g.universe()[i], g.typing[i], g.nodes[i]);
  for (auto [i, j] : g.edges.entries())
    if (keep.count(g.universe()[i].id) && keep.count(g.universe()[j].id))
      b.edge(g.universe()[i].id, g.universe()[j].id);
  return b.build();
}

/// Same nodes, no edges.
inline TypedGraph nodes_only(const TypedGraph& g) {
  return TypedGraph(BoolMatrix(g.universe()), g.nodes, g.typing);
}

}  // namespace mgg
