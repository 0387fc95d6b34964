#pragma once

// Shared test data: the plant grammar and seeded random generators.

#include <random>
#include <string>
#include <vector>

#include "mgg/production.hpp"
#include "mgg/sequence.hpp"

namespace mgg::testing {

/// Plant: machine fed by an input conveyor, output conveyor, operator,
/// one piece waiting on the input conveyor and one on the output.
inline TypedGraph plant_graph() {
  return GraphBuilder()
      .node(ElemId("c1", "1:Conv"), "Conv")
      .node(ElemId("c2", "2:Conv"), "Conv")
      .node(ElemId("m1", "1:Mach"), "Mach")
      .node(ElemId("o1", "1:Oper"), "Oper")
      .node(ElemId("k1", "1:Pack"), "Pack")
      .node(ElemId("k2", "2:Pack"), "Pack")
      .edge("c1", "m1")
      .edge("m1", "c2")
      .edge("o1", "m1")
      .edge("k1", "c1")
      .edge("k2", "c2")
      .build();
}

/// Consumption of a piece: L has the piece on the conveyor feeding the
/// machine and an operator; R drops the piece and marks machine and operator
/// busy with self-loops.
inline Production consume_rule() {
  TypedGraph lhs = GraphBuilder()
                       .node(ElemId("c", "1:Conv"), "Conv")
                       .node(ElemId("m", "1:Mach"), "Mach")
                       .node(ElemId("o", "1:Oper"), "Oper")
                       .node(ElemId("k", "1:Pack"), "Pack")
                       .edge("c", "m")
                       .edge("o", "m")
                       .edge("k", "c")
                       .build();
  TypedGraph rhs = GraphBuilder()
                       .node(ElemId("c", "1:Conv"), "Conv")
                       .node(ElemId("m", "1:Mach"), "Mach")
                       .node(ElemId("o", "1:Oper"), "Oper")
                       .edge("c", "m")
                       .edge("o", "m")
                       .edge("m", "m")
                       .edge("o", "o")
                       .build();
  return from_static("consume", lhs, rhs);
}

// ---------------------------------------------------------------------------
// Random generation

using Rng = std::mt19937_64;

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }
inline std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline const std::vector<std::string>& small_types() {
  static const std::vector<std::string> t{"a", "b"};
  return t;
}

/// Compatible random graph with ids prefix0..prefix{n-1}.
inline TypedGraph random_graph(Rng& rng, std::size_t n, double edge_p, const std::string& prefix = "g",
                               std::size_t ntypes = 2) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i)
    b.node(prefix + std::to_string(i), small_types()[pick(rng, ntypes)]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (coin(rng, edge_p)) b.edge(prefix + std::to_string(i), prefix + std::to_string(j));
  return b.build();
}

/// Random rule over up to `n` shared node ids: some nodes only in L
/// (deleted), some only in R (created), edges random among existing nodes.
inline Production random_rule(Rng& rng, std::size_t n, const std::string& name, const std::string& prefix = "v",
                              std::size_t ntypes = 2) {
  GraphBuilder lb, rb;
  std::vector<std::string> lnodes, rnodes;
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = prefix + std::to_string(i);
    std::string t = small_types()[pick(rng, ntypes)];
    int where = static_cast<int>(pick(rng, 6));  // 0: L only, 1: R only, else both
    if (where != 1) {
      lb.node(id, t);
      lnodes.push_back(id);
    }
    if (where != 0) {
      rb.node(id, t);
      rnodes.push_back(id);
    }
  }
  for (const auto& a : lnodes)
    for (const auto& c : lnodes)
      if (coin(rng, 0.3)) lb.edge(a, c);
  for (const auto& a : rnodes)
    for (const auto& c : rnodes)
      if (coin(rng, 0.3)) rb.edge(a, c);
  return from_static(name, lb.build(), rb.build());
}

}  // namespace mgg::testing
