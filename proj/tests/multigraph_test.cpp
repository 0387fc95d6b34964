#include <gtest/gtest.h>

#include "mgg/multigraph.hpp"
#include "oracles.hpp"

namespace mgg {
namespace {

using testing::coin;
using testing::pick;
using testing::Rng;
using testing::labels;
using testing::parallel_rule;
using testing::random_multigraph;
using testing::random_multirule;
using testing::rows;

TEST(Multigraph, ParallelEdgeRuleMatrices) {
  const Production p = lift_rule(parallel_rule()).production;
  ASSERT_EQ(labels(p.universe()), (std::vector<std::string>{"1", "2", "3", "a1", "a2", "d"}));
  using M = std::vector<std::vector<int>>;
  EXPECT_EQ(rows(p.lhs.edges), (M{{0, 0, 0, 1, 1, 1},
                                  {0, 0, 0, 0, 0, 0},
                                  {0, 0, 0, 0, 0, 0},
                                  {0, 0, 1, 0, 0, 0},
                                  {0, 0, 1, 0, 0, 0},
                                  {0, 1, 0, 0, 0, 0}}));
  const TypedGraph r = compact(p.rhs);
  ASSERT_EQ(labels(r.universe()), (std::vector<std::string>{"1", "2", "3", "a2", "d"}));
  EXPECT_EQ(rows(r.edges), (M{{0, 0, 0, 1, 1},
                              {0, 0, 0, 0, 0},
                              {0, 0, 0, 0, 0},
                              {0, 0, 1, 0, 0},
                              {0, 1, 0, 0, 0}}));
  EXPECT_EQ(rows(p.nihil), (M{{0, 0, 0, 0, 0, 0},
                              {0, 0, 0, 1, 0, 0},
                              {0, 0, 0, 1, 0, 0},
                              {1, 1, 0, 1, 1, 1},
                              {0, 0, 0, 1, 0, 0},
                              {0, 0, 0, 1, 0, 0}}));
  EXPECT_EQ(rows(p.e_edges), (M{{0, 0, 0, 1, 0, 0},
                                {0, 0, 0, 0, 0, 0},
                                {0, 0, 0, 0, 0, 0},
                                {0, 0, 1, 0, 0, 0},
                                {0, 0, 0, 0, 0, 0},
                                {0, 0, 0, 0, 0, 0}}));
  EXPECT_EQ(norm1(p.e_nodes), 1u);
  EXPECT_TRUE(p.r_edges.is_zero());
}

TEST(Multigraph, EncodeSmallCases) {
  EXPECT_EQ(encode(MultiGraph{}).size(), 0u);
  MultiGraph m;
  m.node("u", "a").node("v", "a").edge("e", "u", "v");
  TypedGraph g = encode(m);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_list(), (std::vector<Edge>{{"u", "u>v#1"}, {"u>v#1", "v"}}));
  EXPECT_TRUE(check_mc(g).ok);
  EXPECT_EQ(decode(g), m);
}

TEST(Multigraph, McViolations) {
  // multinode with a self-loop
  TypedGraph loop = GraphBuilder()
                        .node("u", "a")
                        .node("v", "a")
                        .node("m", kMultinodeType)
                        .edge("u", "m")
                        .edge("m", "v")
                        .edge("m", "m")
                        .build();
  EXPECT_FALSE(check_mc(loop).ok);
  EXPECT_FALSE(satisfies(loop, mc_constraint({"a"})));

  // isolated multinode: alternation holds, the one-in/one-out rule does not
  TypedGraph isolated = GraphBuilder().node("u", "a").node("m", kMultinodeType).build();
  EXPECT_TRUE(satisfies(isolated, mc_constraint({"a"})));
  McReport r = check_mc(isolated);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violations.size(), 2u);
  EXPECT_THROW(decode(isolated), MultigraphError);

  TypedGraph direct = GraphBuilder().node("u", "a").node("v", "b").edge("u", "v").build();
  EXPECT_FALSE(check_mc(direct).ok);

  TypedGraph two_sources = GraphBuilder()
                               .node("u", "a")
                               .node("v", "a")
                               .node("m", kMultinodeType)
                               .edge("u", "m")
                               .edge("v", "m")
                               .edge("m", "v")
                               .build();
  EXPECT_FALSE(check_mc(two_sources).ok);
}

TEST(Multigraph, BadInput) {
  MultiGraph m;
  m.node("u", "a").edge("e", "u", "w");
  EXPECT_THROW(encode(m), MultigraphError);
  MultiGraph dup;
  dup.node("u", "a").node("u", "b");
  EXPECT_THROW(encode(dup), MultigraphError);
  MultiRule moved = parallel_rule();
  moved.rhs.edges[1].target = "3";
  EXPECT_THROW(lift_rule(moved), MultigraphError);
}

TEST(Multigraph, IdentityAndAddition) {
  MultiRule id;
  id.name = "id";
  id.lhs.node("1", "a").node("2", "a").edge("x", "1", "2");
  id.rhs = id.lhs;
  EXPECT_TRUE(lift_rule(id).production.does_nothing());

  MultiRule add;
  add.name = "add";
  add.lhs.node("1", "a").node("2", "a");
  add.rhs = add.lhs;
  add.rhs.edge("b", "1", "2");
  const Production p = lift_rule(add).production;
  EXPECT_EQ(norm1(p.r_nodes), 1u);
  EXPECT_EQ(p.r_edges.count(), 2u);
  EXPECT_TRUE(p.e_edges.is_zero());
}

TEST(Multigraph, ConditionsHoldForValidSteps) {
  LiftedRule lr = lift_rule(parallel_rule());
  EXPECT_EQ(lr.pre.anchor, Anchor::Pre);
  EXPECT_EQ(lr.post.anchor, Anchor::Post);
  const TypedGraph host = encode(parallel_rule().lhs);
  const Morphism m = identity_match(lr.production);
  EXPECT_TRUE(holds_at(host, lr.pre, m.node_map));
  EXPECT_TRUE(holds_at(host, lr.post, m.node_map));

  // joining two simple nodes directly breaks the constraint afterwards
  TypedGraph l = GraphBuilder().node("u", "a").node("v", "a").build();
  TypedGraph r = GraphBuilder().node("u", "a").node("v", "a").edge("u", "v").build();
  Production bad = from_static("bad", l, r);
  Condition post = delocalize(mc_constraint({"a"}), global_sequence({bad}), 1, 0);
  EXPECT_FALSE(holds_at(l, post, identity_match(bad).node_map));
}

// Deleting a simple node that still has an untouched edge.
TEST(Multigraph, XiExpansionCounts) {
  MultiGraph h;
  h.node("n1", "a").node("n2", "a").edge("e", "n1", "n2");
  const TypedGraph g = encode(h);
  MultiRule del;
  del.name = "del";
  del.lhs.node("1", "a");
  const Production p = lift_rule(del).production;
  const NodeMap at_n1{{"1", "n1"}};
  const auto ms = find_matches(p, g, &at_n1);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_THROW(apply(p, g, ms[0]), DanglingEdgeError);

  XiExpansion x = xi_expand(p, g, ms[0]);
  EXPECT_EQ(x.xi.e_edges.count(), 2u);
  EXPECT_EQ(norm1(x.xi.e_nodes), 0u);
  EXPECT_EQ(norm1(x.epsilon.e_nodes), 1u);
  EXPECT_EQ(x.epsilon.e_edges.count(), 0u);
  EXPECT_EQ(x.sequence.to_string(), "del;del_eps;del_xi");
  auto trace = derive(x.sequence, g);
  ASSERT_TRUE(trace);
  MultiGraph out = decode(trace->back());
  EXPECT_EQ(out.nodes.size(), 1u);
  EXPECT_TRUE(out.edges.empty());

  XiExpansion f = xi_expand(p, g, ms[0], true);
  EXPECT_TRUE(f.xi.is_empty());
  EXPECT_EQ(f.epsilon.e_edges.count(), 2u);
  EXPECT_EQ(norm1(f.epsilon.e_nodes), 1u);
  EXPECT_EQ(f.sequence.to_string(), "del;del_eps");
  EXPECT_TRUE(applicable(f.sequence, g));
}

TEST(Multigraph, NothingDeletedNothingAdded) {
  const MultiRule r = parallel_rule();
  const TypedGraph g = encode(r.lhs);
  const Production p = lift_rule(r).production;
  XiExpansion x = xi_expand(p, g, identity_match(p));
  EXPECT_TRUE(x.xi.is_empty());
  EXPECT_TRUE(x.epsilon.is_empty());
  EXPECT_EQ(x.sequence.size(), 1u);
}

TEST(MultigraphProperties, RoundTrip) {
  Rng rng(4242);
  for (int t = 0; t < 200; ++t) {
    MultiGraph m = random_multigraph(rng, pick(rng, 6), 8, "n");
    TypedGraph g = encode(m);
    ASSERT_TRUE(check_mc(g).ok);
    ASSERT_EQ(decode(g), m);
    ASSERT_TRUE(testing::multiplicities_agree(m, g));
  }
}

TEST(MultigraphProperties, ExpandedDerivationsKeepTheConstraint) {
  Rng rng(777);
  int done = 0, expanded = 0, plain_failed = 0;
  for (int t = 0; t < 20000 && done < 200; ++t) {
    const MultiGraph hm = random_multigraph(rng, 2 + pick(rng, 4), 7, "h");
    const TypedGraph g = encode(hm);
    const Production p = lift_rule(random_multirule(rng), {"a", "b"}).production;
    const auto ms = find_matches(p, g);
    if (ms.empty()) continue;
    const Morphism& m = ms[pick(rng, ms.size())];
    XiExpansion x = xi_expand(p, g, m, coin(rng, 0.3));
    auto trace = derive(x.sequence, g);
    ASSERT_TRUE(trace) << x.sequence.to_string();
    const TypedGraph& h = trace->back();
    McReport r = check_mc(h);
    ASSERT_TRUE(r.ok) << (r.violations.empty() ? "" : r.violations.front());
    // the decoded result is isomorphic to a fresh encoding of itself
    ASSERT_TRUE(isomorphic(encode(decode(h)), h));
    if (!x.epsilon.is_empty()) {
      ++expanded;
      try {
        apply(p, g, m);
      } catch (const DanglingEdgeError&) {
        ++plain_failed;
      }
    }
    ++done;
  }
  EXPECT_EQ(done, 200);
  EXPECT_GE(expanded, 20);
  EXPECT_EQ(plain_failed, expanded);
}

}  // namespace
}  // namespace mgg
