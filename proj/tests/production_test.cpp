#include <gtest/gtest.h>

#include "mgg/production.hpp"
#include "oracles.hpp"

namespace mgg {
namespace {

using testing::pick;
using testing::Rng;
using testing::oracle_matches;

TEST(Production, RuleAlgebraOnRandomRules) {
  Rng rng(10);
  for (int t = 0; t < 200; ++t) {
    const Production p = testing::random_rule(rng, 1 + pick(rng, 4), "p");
    const BoolMatrix& l = p.lhs.edges;
    const BoolMatrix& r = p.rhs.edges;
    ASSERT_EQ(p.e_edges, l & ~r);
    ASSERT_EQ(p.r_edges, r & ~l);
    ASSERT_EQ(r, p.r_edges | (~p.e_edges & l));
    ASSERT_TRUE((p.e_edges & p.r_edges).is_zero());
    ASSERT_EQ(~p.e_edges & p.r_edges, p.r_edges);
    ASSERT_TRUE(invariant_violations(p).empty());
    ASSERT_TRUE(invariant_violations(invert(p)).empty());
    ASSERT_EQ(invert(invert(p)), p);
  }
}

TEST(Production, ConsumeMatrices) {
  const Production p = testing::consume_rule();
  EXPECT_TRUE(p.e_edges.get("k", "c"));
  EXPECT_EQ(p.e_edges.count(), 1u);
  EXPECT_TRUE(p.r_edges.get("m", "m"));
  EXPECT_TRUE(p.r_edges.get("o", "o"));
  EXPECT_EQ(p.r_edges.count(), 2u);
  EXPECT_TRUE(p.e_nodes[p.universe().at("k")]);
  // K: added loops plus every edge at the deleted piece except the deleted one
  EXPECT_TRUE(p.nihil.get("m", "m"));
  EXPECT_TRUE(p.nihil.get("c", "k"));
  EXPECT_TRUE(p.nihil.get("k", "k"));
  EXPECT_FALSE(p.nihil.get("k", "c"));
  EXPECT_FALSE(p.nihil.get("c", "m"));
}

TEST(Production, BusyMachineBlocksConsume) {
  const Production p = testing::consume_rule();
  TypedGraph g = testing::plant_graph();
  EXPECT_EQ(find_matches(p, g).size(), 1u);
  g.edges.set("m1", "m1");
  EXPECT_TRUE(find_matches(p, g).empty());
}

TEST(Production, ApplyConsume) {
  const Production p = testing::consume_rule();
  const TypedGraph g = testing::plant_graph();
  auto d = apply(p, g, find_matches(p, g).at(0));
  EXPECT_FALSE(d.after.has_node("k1"));
  EXPECT_TRUE(d.after.has_edge("m1", "m1"));
  EXPECT_TRUE(d.after.has_edge("o1", "o1"));
  EXPECT_TRUE(d.after.has_edge("k2", "c2"));
  EXPECT_TRUE(compatible(d.after));
  Morphism bad;
  bad.node_map = {{"c", "c2"}, {"m", "m1"}, {"o", "o1"}, {"k", "k1"}};
  EXPECT_THROW(apply(p, g, bad), InvalidMatchError);
}

TEST(Production, CreatedNodesGetFreshIds) {
  TypedGraph l = GraphBuilder().node("c", "Conv").build();
  TypedGraph r = GraphBuilder().node("c", "Conv").node("k", "Pack").edge("k", "c").build();
  const Production p = from_static("load", l, r);
  auto d = apply(p, testing::plant_graph(), Morphism{{{"c", "c2"}}, {}}, 7);
  EXPECT_EQ(d.comatch.at("k"), fresh_node_id(p, 7, "k"));
  EXPECT_TRUE(d.after.has_edge(d.comatch.at("k"), "c2"));
}

TEST(Production, DanglingAndEpsilon) {
  TypedGraph l = GraphBuilder().node("m", "Mach").build();
  const Production del = from_static("del", l, GraphBuilder().build());
  const TypedGraph g = testing::plant_graph();
  auto ms = find_matches(del, g);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_THROW(apply(del, g, ms[0]), DanglingEdgeError);
  auto rules = epsilon_expand(del, g, ms[0]);
  EXPECT_EQ(rules[1].e_edges.count(), 3u);
  auto d = apply_with_epsilon(del, g, ms[0]);
  EXPECT_FALSE(d.after.has_node("m1"));
  EXPECT_TRUE(compatible(d.after));
  EXPECT_EQ(d.epsilon_rules.size(), 1u);
}

TEST(Production, NoMatchHitsANihilationEdge) {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const Production p = testing::random_rule(rng, 1 + pick(rng, 3), "p");
    const TypedGraph g = testing::random_graph(rng, 1 + pick(rng, 5), 0.3, "h");
    std::set<NodeMap> got;
    for (const auto& m : find_matches(p, g)) {
      got.insert(m.node_map);
      for (auto [i, j] : p.nihil.entries()) {
        const std::string& a = p.universe()[i].id;
        const std::string& b = p.universe()[j].id;
        if (m.defined_on(a) && m.defined_on(b)) ASSERT_FALSE(g.has_edge(m(a), m(b)));
      }
    }
    ASSERT_EQ(got, oracle_matches(p, g));
  }
}

TEST(Production, MarkingForcesSharedNodes) {
  const Production p = testing::consume_rule();
  TypedGraph l = GraphBuilder().node("x", "Mach").build();
  const Production look = identity_rule("look", l);
  auto marked = mark({p, look}, {{{0, "m"}, {1, "x"}}});
  auto joint = joint_matches(marked, testing::plant_graph());
  ASSERT_EQ(joint.size(), 1u);
  EXPECT_EQ(joint[0].at("mu0"), "m1");
  EXPECT_THROW(mark({p}, {{{0, "zz"}}}), InputError);
}

}  // namespace
}  // namespace mgg
