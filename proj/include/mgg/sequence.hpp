#pragma once

// Completed rule sequences: coherence, compatibility, minimal and negative
// initial digraphs, G-congruence, sequential independence, applicability.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mgg/production.hpp"

namespace mgg {

/// Rules renamed onto one global universe. `steps` is in application order:
/// steps[0] is applied first, so the sequence written p_n; ...; p_1 is stored
/// as {p_1, ..., p_n}.
struct CompletedSequence {
  std::vector<Production> steps;
  /// Per step: local element id -> global id.
  std::vector<Identification> identification;
  /// Global ids fixed in advance to host node ids.
  NodeMap binding;

  std::size_t size() const { return steps.size(); }

  /// Notation order "p_n;...;p_1".
  std::string to_string() const {
    std::string s;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) s += (s.empty() ? "" : ";") + it->name;
    return s.empty() ? "<empty>" : s;
  }
};

/// Completes rules (application order) under per-step identifications.
/// Local ids a step does not map become "s<k>.<id>".
inline CompletedSequence complete_sequence(const std::vector<Production>& rules,
                                           const std::vector<Identification>& ident) {
  if (!ident.empty() && ident.size() != rules.size())
    throw InputError("identification must have one entry per rule");
  CompletedSequence s;
  std::map<std::string, TypeSet> types;
  for (std::size_t k = 0; k < rules.size(); ++k) {
    Identification names;
    for (const auto& e : rules[k].universe()) {
      std::string g;
      if (!ident.empty() && ident[k].count(e.id))
        g = ident[k].at(e.id);
      else
        g = "s" + std::to_string(k) + "." + e.id;
      names[e.id] = g;
    }
    Production p = rename(rules[k], names);
    for (std::size_t i = 0; i < p.universe().size(); ++i) {
      const std::string& id = p.universe()[i].id;
      auto it = types.find(id);
      if (it == types.end())
        types.emplace(id, p.lhs.typing[i]);
      else
        it->second = type_meet(it->second, p.lhs.typing[i]);
    }
    s.steps.push_back(std::move(p));
    s.identification.push_back(std::move(names));
  }
  return s;
}

/// Sequence whose rules already use global ids.
inline CompletedSequence global_sequence(std::vector<Production> steps, NodeMap binding = {}) {
  CompletedSequence s;
  for (auto& p : steps) {
    Identification id;
    for (const auto& e : p.universe()) id[e.id] = e.id;
    s.identification.push_back(std::move(id));
  }
  s.steps = std::move(steps);
  s.binding = std::move(binding);
  return s;
}

struct SequenceReport {
  bool coherent = true;
  TypedGraph conflicts;  // offending nodes and edges, empty when coherent
  bool compatible = true;
  std::vector<Edge> dangling;  // edges left without an endpoint at some step
  TypedGraph mid;              // minimal initial digraph
  TypedGraph nid;              // negative initial digraph (edges must be absent)
};

namespace detail {

enum class Fact { Unknown, Present, Absent };

class SymbolicRun {
public:
  explicit SymbolicRun(const CompletedSequence& s) : s_(s) {}

  SequenceReport run() {
    for (const auto& p : s_.steps) step(p);
    SequenceReport r;
    r.coherent = conflict_nodes_.empty() && conflict_edges_.empty();
    r.compatible = dangling_.empty();
    r.dangling.assign(dangling_.begin(), dangling_.end());
    r.mid = graph(mid_nodes_, mid_edges_);
    r.nid = graph(mid_nodes_, nid_edges_);
    std::set<std::string> cn(conflict_nodes_.begin(), conflict_nodes_.end());
    for (const auto& [a, b] : conflict_edges_) {
      cn.insert(a);
      cn.insert(b);
    }
    r.conflicts = graph(std::vector<std::string>(cn.begin(), cn.end()), conflict_edges_);
    return r;
  }

private:
  Fact node(const std::string& n) const {
    auto it = nodes_.find(n);
    return it == nodes_.end() ? Fact::Unknown : it->second;
  }
  Fact edge(const Edge& e) const {
    auto it = edges_.find(e);
    if (it != edges_.end()) return it->second;
    // Edges of nodes born or killed inside the sequence cannot come from the host.
    if (touched_.count(e.first) || touched_.count(e.second)) return Fact::Absent;
    return Fact::Unknown;
  }
  void note_type(const std::string& id, const TypeSet& t) {
    auto it = types_.find(id);
    if (it == types_.end()) {
      order_.push_back(id);
      types_.emplace(id, t);
    } else {
      it->second = type_meet(it->second, t);
    }
  }
  void conflict_node(const std::string& n) {
    if (std::find(conflict_nodes_.begin(), conflict_nodes_.end(), n) == conflict_nodes_.end())
      conflict_nodes_.push_back(n);
  }
  void conflict_edge(const Edge& e) {
    if (std::find(conflict_edges_.begin(), conflict_edges_.end(), e) == conflict_edges_.end())
      conflict_edges_.push_back(e);
  }

  void step(const Production& p) {
    const Universe& u = p.universe();
    for (std::size_t i = 0; i < u.size(); ++i) note_type(u[i].id, p.lhs.typing[i]);

    // Requirements: L present, K absent.
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!p.lhs.nodes[i]) continue;
      const std::string& n = u[i].id;
      switch (node(n)) {
        case Fact::Absent: conflict_node(n); break;
        case Fact::Unknown:
          mid_nodes_.push_back(n);
          nodes_[n] = Fact::Present;
          break;
        case Fact::Present: break;
      }
    }
    for (auto [i, j] : p.lhs.edges.entries()) {
      Edge e{u[i].id, u[j].id};
      switch (edge(e)) {
        case Fact::Absent: conflict_edge(e); break;
        case Fact::Unknown:
          mid_edges_.push_back(e);
          edges_[e] = Fact::Present;
          break;
        case Fact::Present: break;
      }
    }
    for (auto [i, j] : p.nihil.entries()) {
      if (!p.lhs.nodes[i] || !p.lhs.nodes[j]) continue;
      Edge e{u[i].id, u[j].id};
      switch (edge(e)) {
        case Fact::Present: conflict_edge(e); break;
        case Fact::Unknown:
          nid_edges_.push_back(e);
          edges_[e] = Fact::Absent;
          break;
        case Fact::Absent: break;
      }
    }

    // Effects.
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::string& n = u[i].id;
      if (p.r_nodes[i] && node(n) == Fact::Present) conflict_node(n);
      if (p.e_nodes[i] || p.r_nodes[i]) touched_.insert(n);
      if (p.e_nodes[i]) nodes_[n] = Fact::Absent;
      if (p.r_nodes[i]) nodes_[n] = Fact::Present;
    }
    for (auto [i, j] : p.e_edges.entries()) edges_[{u[i].id, u[j].id}] = Fact::Absent;
    for (auto [i, j] : p.r_edges.entries()) edges_[{u[i].id, u[j].id}] = Fact::Present;

    for (const auto& [e, f] : edges_)
      if (f == Fact::Present && (node(e.first) != Fact::Present || node(e.second) != Fact::Present))
        dangling_.insert(e);
  }

  TypedGraph graph(const std::vector<std::string>& ns, const std::vector<Edge>& es) const {
    GraphBuilder b;
    std::set<std::string> keep(ns.begin(), ns.end());
    for (const auto& id : order_)
      if (keep.count(id)) b.node(id, types_.at(id));
    for (const auto& [a, c] : es) b.edge(a, c);
    return b.build();
  }

  const CompletedSequence& s_;
  std::map<std::string, Fact> nodes_;
  std::map<Edge, Fact> edges_;
  std::set<std::string> touched_;
  std::map<std::string, TypeSet> types_;
  std::vector<std::string> order_;
  std::vector<std::string> mid_nodes_, conflict_nodes_;
  std::vector<Edge> mid_edges_, nid_edges_, conflict_edges_;
  std::set<Edge> dangling_;
};

}  // namespace detail

/// Symbolic forward execution with per-element facts {unknown, present,
/// absent}. L-elements must not be absent (unknown ones join the MID),
/// K-edges must not be present (unknown ones join the NID), then e and r
/// take effect.
inline SequenceReport analyze(const CompletedSequence& s) { return detail::SymbolicRun(s).run(); }

/// Concrete execution on `g`: each step needs a match agreeing with the
/// global ids bound so far (starting from the sequence's own binding plus
/// `binding`), and must not dangle. Returns the graphs visited, g first, for
/// the first run that gets through (matches tried in enumeration order).
/// Overlap::Forbidden keeps distinct global ids on distinct host nodes; the
/// default lets ids the completion left apart share a node.
enum class Overlap { Allowed, Forbidden };

inline std::optional<std::vector<TypedGraph>> derive(const CompletedSequence& s, const TypedGraph& g,
                                                     const NodeMap& binding = {},
                                                     Overlap overlap = Overlap::Allowed) {
  NodeMap start = binding;
  start.insert(s.binding.begin(), s.binding.end());
  std::vector<TypedGraph> trace{g};
  std::function<bool(std::size_t, const NodeMap&)> go = [&](std::size_t k, const NodeMap& bound) -> bool {
    if (k == s.steps.size()) return true;
    const Production& p = s.steps[k];
    const TypedGraph h = trace.back();
    for (const auto& m : find_matches(p, h, &bound)) {
      DerivationResult d;
      try {
        d = apply(p, h, m, k);
      } catch (const DanglingEdgeError&) {
        continue;
      }
      NodeMap next = bound;
      std::map<std::string, std::string> taken;
      for (const auto& [global, host] : bound) taken.emplace(host, global);
      bool clash = false;
      auto bind = [&](const std::string& global, const std::string& host) {
        auto [it, fresh] = next.emplace(global, host);
        if (!fresh && it->second != host) clash = true;
        auto [ht, hfresh] = taken.emplace(host, global);
        if (overlap == Overlap::Forbidden && !hfresh && ht->second != global) clash = true;
      };
      for (const auto& [local, host] : m.node_map) bind(local, host);
      // a deleted node frees its global id for a later creation
      for (std::size_t i = 0; i < p.universe().size(); ++i)
        if (p.e_nodes[i]) {
          auto it = next.find(p.universe()[i].id);
          if (it == next.end()) continue;
          taken.erase(it->second);
          next.erase(it);
        }
      for (const auto& [local, host] : d.comatch) bind(local, host);
      if (clash) continue;
      trace.push_back(std::move(d.after));
      if (go(k + 1, next)) return true;
      trace.pop_back();
    }
    return false;
  };
  if (!go(0, start)) return std::nullopt;
  return trace;
}

inline bool applicable(const CompletedSequence& s, const TypedGraph& g, const NodeMap& binding = {},
                       Overlap overlap = Overlap::Allowed) {
  return derive(s, g, binding, overlap).has_value();
}

struct Congruence {
  bool congruent = false;
  TypedGraph mid_delta;  // symmetric difference of the two MIDs
  TypedGraph nid_delta;
};

namespace detail {

inline TypedGraph symmetric_difference(const TypedGraph& a, const TypedGraph& b) {
  auto c = complete({a, b});
  return TypedGraph(c[0].edges ^ c[1].edges, c[0].nodes ^ c[1].nodes, c[0].typing);
}

inline bool is_permutation(const CompletedSequence& a, const CompletedSequence& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& p : a.steps) {
    bool hit = false;
    for (std::size_t j = 0; j < b.size() && !hit; ++j)
      if (!used[j] && b.steps[j] == p) used[j] = hit = true;
    if (!hit) return false;
  }
  return true;
}

}  // namespace detail

/// Same MID and NID for a sequence and a permutation of it.
inline Congruence g_congruent(const CompletedSequence& s1, const CompletedSequence& s2) {
  if (!detail::is_permutation(s1, s2))
    throw InputError("sequences are not permutations of each other");
  auto r1 = analyze(s1);
  auto r2 = analyze(s2);
  Congruence c;
  c.mid_delta = detail::symmetric_difference(r1.mid, r2.mid);
  c.nid_delta = detail::symmetric_difference(r1.nid, r2.nid);
  c.congruent = c.mid_delta.edges.is_zero() && !norm1(c.mid_delta.nodes) &&
                c.nid_delta.edges.is_zero() && !norm1(c.nid_delta.nodes);
  return c;
}

inline bool sequentially_independent(const CompletedSequence& s1, const CompletedSequence& s2) {
  auto c = g_congruent(s1, s2);
  auto r1 = analyze(s1);
  auto r2 = analyze(s2);
  return c.congruent && r1.coherent && r1.compatible && r2.coherent && r2.compatible;
}

}  // namespace mgg
