#pragma once

// Injective, type-compatible morphisms between typed simple digraphs.
//
// All enumerations walk source nodes in universe order and try target
// candidates in universe order, so results come out lexicographically sorted.

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mgg/digraph.hpp"

namespace mgg {

using NodeMap = std::map<std::string, std::string>;

struct Morphism {
  NodeMap node_map;                          // source id -> target id
  std::vector<std::pair<Edge, Edge>> edge_map;  // induced: (n,m) -> (f(n), f(m))

  std::string operator()(const std::string& n) const { return node_map.at(n); }
  bool defined_on(const std::string& n) const { return node_map.count(n) != 0; }

  friend bool operator==(const Morphism& a, const Morphism& b) { return a.node_map == b.node_map; }
};

struct MatchConstraints {
  /// Source nodes whose image is fixed in advance.
  const NodeMap* pins = nullptr;
  /// Every source edge must have an image edge.
  bool total_on_edges = false;
  /// Edges (over the source universe) whose image must be absent in the target.
  const BoolMatrix* forbidden = nullptr;
};

namespace detail {

class NodeMapSearch {
public:
  NodeMapSearch(const TypedGraph& a, const TypedGraph& g, const MatchConstraints& c)
      : a_(a), g_(g), c_(c) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.nodes[i]) src_.push_back(i);
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.nodes[j]) cand_.push_back(j);
    image_.assign(src_.size(), 0);
    used_.assign(g.size(), false);
    if (c.forbidden && !(c.forbidden->universe() == a.universe()))
      throw AlignmentError("forbidden edges must live on the source universe");
  }

  /// Calls `visit` for each complete assignment until it returns false.
  void run(const std::function<bool(const std::vector<std::size_t>&,
                                    const std::vector<std::size_t>&)>& visit) {
    visit_ = &visit;
    stop_ = false;
    extend(0);
  }

private:
  bool consistent(std::size_t k, std::size_t y) const {
    const std::size_t x = src_[k];
    if (!a_.typing[x].intersects(g_.typing[y])) return false;
    if (c_.pins) {
      auto it = c_.pins->find(a_.universe()[x].id);
      if (it != c_.pins->end() && it->second != g_.universe()[y].id) return false;
    }
    for (std::size_t q = 0; q <= k; ++q) {
      const std::size_t x2 = src_[q];
      const std::size_t y2 = q == k ? y : image_[q];
      if (c_.total_on_edges) {
        if (a_.edges.get(x, x2) && !g_.edges.get(y, y2)) return false;
        if (a_.edges.get(x2, x) && !g_.edges.get(y2, y)) return false;
      }
      if (c_.forbidden) {
        if (c_.forbidden->get(x, x2) && g_.edges.get(y, y2)) return false;
        if (c_.forbidden->get(x2, x) && g_.edges.get(y2, y)) return false;
      }
    }
    return true;
  }

  void extend(std::size_t k) {
    if (stop_) return;
    if (k == src_.size()) {
      if (!(*visit_)(src_, image_)) stop_ = true;
      return;
    }
    for (std::size_t y : cand_) {
      if (used_[y] || !consistent(k, y)) continue;
      used_[y] = true;
      image_[k] = y;
      extend(k + 1);
      used_[y] = false;
      if (stop_) return;
    }
  }

  const TypedGraph& a_;
  const TypedGraph& g_;
  const MatchConstraints& c_;
  std::vector<std::size_t> src_, cand_, image_;
  std::vector<bool> used_;
  const std::function<bool(const std::vector<std::size_t>&, const std::vector<std::size_t>&)>*
      visit_ = nullptr;
  bool stop_ = false;
};

inline Morphism make_morphism(const TypedGraph& a, const TypedGraph& g,
                              const std::vector<std::size_t>& src,
                              const std::vector<std::size_t>& img) {
  Morphism m;
  std::vector<std::size_t> pos(a.size(), 0);
  std::vector<bool> mapped(a.size(), false);
  for (std::size_t k = 0; k < src.size(); ++k) {
    m.node_map.emplace(a.universe()[src[k]].id, g.universe()[img[k]].id);
    pos[src[k]] = img[k];
    mapped[src[k]] = true;
  }
  for (auto [i, j] : a.edges.entries())
    if (mapped[i] && mapped[j] && g.edges.get(pos[i], pos[j]))
      m.edge_map.emplace_back(Edge{a.universe()[i].id, a.universe()[j].id},
                              Edge{g.universe()[pos[i]].id, g.universe()[pos[j]].id});
  return m;
}

}  // namespace detail

/// Enumerates node-total injective maps honouring `c`, stopping early when
/// `visit` returns false.
inline void for_each_morphism(const TypedGraph& a, const TypedGraph& g, const MatchConstraints& c,
                              const std::function<bool(const Morphism&)>& visit) {
  detail::NodeMapSearch search(a, g, c);
  search.run([&](const auto& src, const auto& img) {
    return visit(detail::make_morphism(a, g, src, img));
  });
}

inline std::vector<Morphism> morphisms(const TypedGraph& a, const TypedGraph& g,
                                       const MatchConstraints& c) {
  std::vector<Morphism> out;
  for_each_morphism(a, g, c, [&](const Morphism& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

/// Maximal partial morphisms with Dom(f)^V = A^V: every node of `a` mapped,
/// edges mapped wherever the target has them. A node-less `a` yields the
/// single vacuous morphism.
inline std::vector<Morphism> par_max(const TypedGraph& a, const TypedGraph& g,
                                     const NodeMap* pins = nullptr) {
  MatchConstraints c;
  c.pins = pins;
  return morphisms(a, g, c);
}

/// Members of par_max that map every edge.
inline std::vector<Morphism> tot(const TypedGraph& a, const TypedGraph& g,
                                 const NodeMap* pins = nullptr) {
  MatchConstraints c;
  c.pins = pins;
  c.total_on_edges = true;
  return morphisms(a, g, c);
}

inline bool is_total(const Morphism& f, const TypedGraph& a) {
  return f.edge_map.size() == a.edge_count();
}

/// Bijective total morphisms whose inverse is total as well.
inline std::vector<Morphism> iso(const TypedGraph& a, const TypedGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return {};
  // Same counts plus an injective, edge-total map forces a bijection on both.
  return tot(a, b);
}

inline bool isomorphic(const TypedGraph& a, const TypedGraph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  bool found = false;
  MatchConstraints c;
  c.total_on_edges = true;
  for_each_morphism(a, b, c, [&](const Morphism&) {
    found = true;
    return false;
  });
  return found;
}

/// Matches of a left-hand side `lhs` whose nihilation edges `nihil` (same
/// universe as lhs) all fall into the complement of `g`. Only nihilation
/// edges between lhs nodes constrain the match; edges to nodes the rule
/// creates cannot exist in `g`.
inline std::vector<Morphism> find_matches(const TypedGraph& lhs, const BoolMatrix& nihil,
                                          const TypedGraph& g, const NodeMap* pins = nullptr) {
  MatchConstraints c;
  c.pins = pins;
  c.total_on_edges = true;
  c.forbidden = &nihil;
  return morphisms(lhs, g, c);
}

}  // namespace mgg
