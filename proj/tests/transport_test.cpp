#include <gtest/gtest.h>

#include "mgg/transport.hpp"
#include "oracles.hpp"

namespace mgg {
namespace {

using testing::coin;
using testing::pick;
using testing::Rng;
using testing::edges_of;
using testing::revert_precondition;
using testing::revert_rule;

TEST(Transport, RevertedEdge) {
  Condition post = pre_to_post(revert_precondition(false));
  EXPECT_EQ(post.anchor, Anchor::Post);
  const DiagramGraph& a = post.graph("A");
  EXPECT_EQ(edges_of(a.graph.edges), (std::set<Edge>{{"2", "1"}, {"3", "2"}}));
  EXPECT_EQ(edges_of(a.nihil), (std::set<Edge>{{"1", "2"}, {"1", "1"}}));
  ASSERT_EQ(post.morphisms.size(), 1u);
  EXPECT_EQ(post.morphisms[0].from, "R");
}

TEST(Transport, AdaptedConditionGainsReversedEdgeInNihil) {
  Condition adapted = adapted_fixpoint(revert_precondition(false));
  const DiagramGraph& a = adapted.graph("A");
  EXPECT_EQ(edges_of(a.graph.edges), (std::set<Edge>{{"1", "2"}, {"1", "1"}, {"3", "2"}}));
  EXPECT_EQ(edges_of(a.nihil), (std::set<Edge>{{"2", "1"}}));
  EXPECT_TRUE(structurally_equal(adapted_fixpoint(adapted), adapted));
}

TEST(Transport, RedundantGraphIsConsumed) {
  Condition post = pre_to_post(revert_precondition(true));
  EXPECT_EQ(post.graphs.size(), 1u);
  EXPECT_EQ(to_string(post.formula), "exists A [A]");
}

TEST(Transport, IdentityRuleKeepsCondition) {
  TypedGraph l = GraphBuilder().node("1", "a").node("2", "b").edge("1", "2").build();
  Condition c;
  c.anchor = Anchor::Pre;
  c.rule = identity_rule("id", l);
  c.graphs.emplace_back("A", GraphBuilder().node("x", "a").node("y", "a").edge("y", "x").build());
  c.morphisms.push_back({"L", "A", {{"1", "x"}}});
  c.formula = parse_formula("nexists A [A]");
  Condition post = pre_to_post(c);
  EXPECT_EQ(post.graph("A"), c.graph("A"));
  EXPECT_EQ(post.morphisms, (std::vector<DiagramMorphism>{{"R", "A", {{"1", "x"}}}}));
  EXPECT_TRUE(structurally_equal(post_to_pre(post), normalize(c)));
}

TEST(Transport, DanglingRequirementIsInconsistent) {
  // the rule deletes node 1 but the condition wants an edge from it to an
  // unrelated node
  TypedGraph l = GraphBuilder().node("1", "a").build();
  TypedGraph r = GraphBuilder().build();
  Condition c;
  c.anchor = Anchor::Pre;
  c.rule = from_static("del", l, r);
  c.graphs.emplace_back("A", GraphBuilder().node("x", "a").node("y", "a").edge("x", "y").build());
  c.morphisms.push_back({"L", "A", {{"1", "x"}}});
  c.formula = parse_formula("exists A [A]");
  EXPECT_THROW(pre_to_post(c), ConditionError);
}

TEST(TransportProperties, RoundTripIsAFixpoint) {
  Rng rng(606);
  int done = 0;
  for (int t = 0; t < 2000 && done < 200; ++t) {
    Production p = testing::random_rule(rng, 3, "p");
    Anchor a = coin(rng, 0.5) ? Anchor::Pre : Anchor::Post;
    Condition c = testing::random_application_condition(rng, p, a);
    Condition adapted;
    try {
      adapted = adapted_fixpoint(c);
    } catch (const ConditionError&) {
      continue;
    }
    ++done;
    ASSERT_TRUE(structurally_equal(adapted_fixpoint(adapted), adapted)) << to_string(adapted);
  }
  EXPECT_EQ(done, 200);
}

/// Precondition whose graphs are made of L's nodes only.
Condition anchored_precondition(Rng& rng, const Production& p) {
  testing::CondGenOptions o;
  for (;;) {
    Condition c;
    c.anchor = Anchor::Pre;
    c.rule = p;
    const TypedGraph side = c.side_graph();
    const auto ids = side.node_ids();
    const std::size_t n = 1 + pick(rng, 2);
    for (std::size_t i = 0; i < n; ++i) {
      std::set<std::string> keep;
      for (const auto& id : ids)
        if (coin(rng, 0.7)) keep.insert(id);
      TypedGraph g = restrict_to(side, keep);
      g.edges = BoolMatrix(g.universe());
      DiagramGraph x("A" + std::to_string(i), g);
      for (std::size_t u = 0; u < g.size(); ++u)
        for (std::size_t v = 0; v < g.size(); ++v) {
          if (coin(rng, 0.3)) x.graph.edges.set(u, v);
          else if (coin(rng, 0.2)) x.nihil.set(u, v);
        }
      NodeMap m;
      for (const auto& id : keep) m.emplace(id, id);
      if (!m.empty()) c.morphisms.push_back({"L", x.name(), m});
      c.graphs.push_back(std::move(x));
    }
    c.formula = testing::random_formula(rng, c, o);
    try {
      validate(c);
      return c;
    } catch (const ConditionError&) {
    }
  }
}

TEST(TransportProperties, AnchoredGraphsKeepTheirMeaning) {
  Rng rng(31337);
  int done = 0;
  for (int t = 0; t < 3000 && done < 150; ++t) {
    Production p = testing::random_rule(rng, 3, "p");
    Condition pre = anchored_precondition(rng, p);
    Condition post;
    try {
      post = pre_to_post(pre);
    } catch (const ConditionError&) {
      continue;
    }
    TypedGraph g = testing::random_graph(rng, 4, 0.35, "h");
    bool lhs = false;
    try {
      lhs = satisfies(g, pre);
    } catch (const ConditionError&) {
      continue;
    }
    ++done;
    ASSERT_EQ(lhs, satisfies(g, post)) << to_string(pre) << "\n--\n" << to_string(post);
    ASSERT_EQ(lhs, satisfies(g, post_to_pre(post))) << to_string(pre);
  }
  EXPECT_GE(done, 100);
}

TEST(Delocalize, AdjacentAnchorsMatchTheStates) {
  Rng rng(88);
  int done = 0;
  for (int t = 0; t < 3000 && done < 100; ++t) {
    Condition gc = testing::random_constraint(rng);
    CompletedSequence s = complete_sequence({testing::random_rule(rng, 2, "p"), testing::random_rule(rng, 2, "q")}, {});
    TypedGraph g0 = testing::random_graph(rng, 4, 0.3, "h");
    auto m0s = find_matches(s.steps[0], g0);
    if (m0s.empty()) continue;
    const Morphism m0 = m0s[pick(rng, m0s.size())];
    TypedGraph g1;
    try {
      g1 = apply(s.steps[0], g0, m0, 0).after;
    } catch (const DanglingEdgeError&) {
      continue;
    }
    auto m1s = find_matches(s.steps[1], g1);
    if (m1s.empty()) continue;
    const Morphism m1 = m1s[pick(rng, m1s.size())];
    TypedGraph g2;
    try {
      g2 = apply(s.steps[1], g1, m1, 0).after;
    } catch (const DanglingEdgeError&) {
      continue;
    }
    bool at0 = false, at1 = false, at2 = false;
    try {
      at0 = satisfies(g0, gc);
      at1 = satisfies(g1, gc);
      at2 = satisfies(g2, gc);
    } catch (const ConditionError&) {
      continue;
    }
    ++done;
    EXPECT_EQ(holds_at(g0, delocalize(gc, s, 0, 0), m0.node_map), at0);
    EXPECT_EQ(holds_at(g0, delocalize(gc, s, 1, 0), m0.node_map), at1);
    EXPECT_EQ(holds_at(g1, delocalize(gc, s, 1, 1), m1.node_map), at1);
    EXPECT_EQ(holds_at(g1, delocalize(gc, s, 2, 1), m1.node_map), at2);
  }
  EXPECT_EQ(done, 100);
}

TEST(Delocalize, PreconditionShape) {
  Condition gc;
  gc.graphs.emplace_back("A", GraphBuilder().node("x", "Mach").build());
  gc.formula = parse_formula("exists A [A]");
  CompletedSequence s = global_sequence({testing::consume_rule()});
  Condition pre = delocalize(gc, s, 0, 0);
  EXPECT_EQ(pre.anchor, Anchor::Pre);
  EXPECT_EQ(to_string(pre.formula), "exists L K [L & P(K, ~G) & exists A [A]]");
  Condition post = delocalize(gc, s, 1, 0);
  EXPECT_EQ(post.anchor, Anchor::Post);
  EXPECT_EQ(to_string(post.formula), "exists R Q [R & P(Q, ~G) & exists A [A]]");
  EXPECT_THROW(delocalize(gc, s, 2, 0), InputError);
}

}  // namespace
}  // namespace mgg
