// Acceptance runner: one line per criterion, exit status 1 if any fails.

#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mgg/mgg.hpp"
#include "oracles.hpp"

namespace mgg::acceptance {
namespace {

using testing::coin;
using testing::pick;
using testing::Rng;

struct Failure {
  std::string what;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string c1_rule_algebra() {
  Rng rng(10);
  for (int t = 0; t < 200; ++t) {
    const Production p = testing::random_rule(rng, 1 + pick(rng, 4), "p");
    const BoolMatrix& l = p.lhs.edges;
    const BoolMatrix& r = p.rhs.edges;
    check(p.e_edges == (l & ~r), "e != L and not R");
    check(p.r_edges == (r & ~l), "r != R and not L");
    check(r == (p.r_edges | (~p.e_edges & l)), "R != r or (not e) L");
    check((p.e_edges & p.r_edges).is_zero(), "e and r overlap");
    check((~p.e_edges & p.r_edges) == p.r_edges, "(not e) r != r");
  }
  return "200 random rules";
}

std::string c2_nihilation() {
  const Production consume = testing::consume_rule();
  TypedGraph busy = testing::plant_graph();
  check(!find_matches(consume, busy).empty(), "consume has no match on the plant");
  busy.edges.set("m1", "m1");
  check(find_matches(consume, busy).empty(), "consume matched a busy machine");
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
        check(!(m.defined_on(a) && m.defined_on(b) && g.has_edge(m(a), m(b))), "a match hits a K edge");
      }
    }
    check(got == testing::oracle_matches(p, g), "matches differ from enumeration");
  }
  return "busy machine rejected; 1000 rule/host pairs";
}

std::string c3_compatibility() {
  check(compatible(testing::plant_graph()), "plant graph reported incompatible");
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const TypedGraph g = testing::random_mv(rng, pick(rng, 9));
    check(compatible(g) == testing::endpoint_scan(g), "compatible() disagrees with endpoint scan");
  }
  return "plant plus 1000 (M, V) pairs";
}

std::string c4_sequences() {
  Rng rng(303);
  int done = 0, good = 0;
  for (int t = 0; t < 5000 && done < 300; ++t) {
    auto s = testing::random_sequence(rng);
    if (!s) continue;
    ++done;
    bool ok = false;
    if (auto bad = testing::sequence_disagreement(*s, &ok)) throw Failure{*bad};
    good += ok;
  }
  check(done == 300, "generated only " + std::to_string(done) + " sequences");
  return "300 sequences, " + std::to_string(good) + " coherent and compatible";
}

int exact_family(const std::function<Condition(Rng&)>& gen, unsigned seed, const std::string& name) {
  Rng rng(seed);
  int done = 0;
  for (int t = 0; t < 4000 && done < 200; ++t) {
    const Condition c = gen(rng);
    const TypedGraph g = testing::random_graph(rng, 3 + pick(rng, 2), 0.35, "h");
    std::vector<CompletedSequence> seqs;
    try {
      seqs = compile_to_sequences(c, g);
    } catch (const ConditionError&) {
      continue;
    }
    ++done;
    check(satisfies(g, c) == testing::any_applicable(seqs, g), name + ": " + to_string(c));
  }
  check(done == 200, name + ": only " + std::to_string(done) + " instances");
  return done;
}

std::string c5_compilation() {
  const auto seqs = compile_to_sequences(testing::busy_postcondition(), testing::two_machines());
  check(seqs.size() == 4, "plant postcondition gives " + std::to_string(seqs.size()) + " sequences");
  std::set<std::string> shapes;
  for (const auto& s : seqs) shapes.insert(s.steps.at(1).name + " " + s.steps.at(2).name);
  const std::set<std::string> want{"nid_A0.1 nid_A0.2", "nid_A0.1 id_A1.2", "id_A1.1 nid_A0.2", "id_A1.1 id_A1.2"};
  check(shapes == want, "plant postcondition sequences differ");
  exact_family(testing::random_match_condition, 501, "match");
  exact_family(testing::random_closure_condition, 502, "closure");
  exact_family(testing::random_decompose_condition, 503, "decompose");
  exact_family(testing::random_nac_condition, 504, "nac");
  return "plant postcondition gives 4 sequences; 4 x 200 instances exact";
}

std::string c6_commutation() {
  Rng rng(505);
  for (int t = 0; t < 100; ++t) {
    const Condition c = testing::random_nac_condition(rng);
    const TypedGraph g = testing::random_graph(rng, 3 + pick(rng, 2), 0.35, "h");
    check(structurally_equal(nac(c, g, NacOrder::CloseFirst), nac(c, g, NacOrder::DecomposeFirst)),
          "orders differ on " + to_string(c));
  }
  return "100 NAC conditions";
}

std::string c7_round_trip() {
  using E = std::set<Edge>;
  const Condition post = pre_to_post(testing::revert_precondition(false));
  check(testing::edges_of(post.graph("A").graph.edges) == E{{"2", "1"}, {"3", "2"}}, "reverted edge missing");
  check(testing::edges_of(post.graph("A").nihil) == E{{"1", "2"}, {"1", "1"}}, "deleted edges not forbidden");
  const Condition adapted = adapted_fixpoint(testing::revert_precondition(false));
  check(testing::edges_of(adapted.graph("A").nihil) == E{{"2", "1"}}, "(2,1) not in the adapted nihil part");
  Rng rng(606);
  int done = 0;
  for (int t = 0; t < 2000 && done < 200; ++t) {
    Production p = testing::random_rule(rng, 3, "p");
    Condition c = testing::random_application_condition(rng, p, coin(rng, 0.5) ? Anchor::Pre : Anchor::Post);
    Condition a;
    try {
      a = adapted_fixpoint(c);
    } catch (const ConditionError&) {
      continue;
    }
    ++done;
    check(structurally_equal(adapted_fixpoint(a), a), "not a fixpoint: " + to_string(a));
  }
  check(done == 200, "only " + std::to_string(done) + " consistent pairs");
  return "reverted edge example; 200 adapted conditions";
}

std::string c8_delocalization() {
  Rng rng(88);
  int done = 0;
  for (int t = 0; t < 3000 && done < 100; ++t) {
    Condition gc = testing::random_constraint(rng);
    CompletedSequence s =
        complete_sequence({testing::random_rule(rng, 2, "p"), testing::random_rule(rng, 2, "q")}, {});
    TypedGraph g0 = testing::random_graph(rng, 4, 0.3, "h");
    auto m0s = find_matches(s.steps[0], g0);
    if (m0s.empty()) continue;
    const Morphism m0 = m0s[pick(rng, m0s.size())];
    TypedGraph g1, g2;
    Morphism m1;
    try {
      g1 = apply(s.steps[0], g0, m0, 0).after;
      auto m1s = find_matches(s.steps[1], g1);
      if (m1s.empty()) continue;
      m1 = m1s[pick(rng, m1s.size())];
      g2 = apply(s.steps[1], g1, m1, 0).after;
    } catch (const DanglingEdgeError&) {
      continue;
    }
    bool at0, at1, at2;
    try {
      at0 = satisfies(g0, gc);
      at1 = satisfies(g1, gc);
      at2 = satisfies(g2, gc);
    } catch (const ConditionError&) {
      continue;
    }
    ++done;
    check(holds_at(g0, delocalize(gc, s, 0, 0), m0.node_map) == at0, "state 0 as precondition of rule 1");
    check(holds_at(g0, delocalize(gc, s, 1, 0), m0.node_map) == at1, "state 1 as postcondition of rule 1");
    check(holds_at(g1, delocalize(gc, s, 1, 1), m1.node_map) == at1, "state 1 as precondition of rule 2");
    check(holds_at(g1, delocalize(gc, s, 2, 1), m1.node_map) == at2, "state 2 as postcondition of rule 2");
  }
  check(done == 100, "only " + std::to_string(done) + " instances");
  return "100 constraint/sequence instances";
}

std::string c9_multigraph() {
  using M = std::vector<std::vector<int>>;
  const Production p = lift_rule(testing::parallel_rule()).production;
  check(testing::labels(p.universe()) == std::vector<std::string>{"1", "2", "3", "a1", "a2", "d"}, "universe order");
  check(testing::rows(p.lhs.edges) == M{{0, 0, 0, 1, 1, 1},
                                        {0, 0, 0, 0, 0, 0},
                                        {0, 0, 0, 0, 0, 0},
                                        {0, 0, 1, 0, 0, 0},
                                        {0, 0, 1, 0, 0, 0},
                                        {0, 1, 0, 0, 0, 0}},
        "L");
  check(testing::rows(compact(p.rhs).edges) == M{{0, 0, 0, 1, 1},
                                                 {0, 0, 0, 0, 0},
                                                 {0, 0, 0, 0, 0},
                                                 {0, 0, 1, 0, 0},
                                                 {0, 1, 0, 0, 0}},
        "R");
  check(testing::rows(p.nihil) == M{{0, 0, 0, 0, 0, 0},
                                    {0, 0, 0, 1, 0, 0},
                                    {0, 0, 0, 1, 0, 0},
                                    {1, 1, 0, 1, 1, 1},
                                    {0, 0, 0, 1, 0, 0},
                                    {0, 0, 0, 1, 0, 0}},
        "K");
  check(testing::rows(p.e_edges) == M{{0, 0, 0, 1, 0, 0},
                                      {0, 0, 0, 0, 0, 0},
                                      {0, 0, 0, 0, 0, 0},
                                      {0, 0, 1, 0, 0, 0},
                                      {0, 0, 0, 0, 0, 0},
                                      {0, 0, 0, 0, 0, 0}},
        "e");
  Rng rng(4242);
  for (int t = 0; t < 200; ++t) {
    const MultiGraph m = testing::random_multigraph(rng, pick(rng, 6), 8, "n");
    const TypedGraph g = encode(m);
    check(check_mc(g).ok, "encoding violates the constraint");
    check(decode(g) == m, "decode(encode(m)) != m");
    check(testing::multiplicities_agree(m, g), "multiplicities differ");
  }
  Rng rng2(777);
  int done = 0;
  for (int t = 0; t < 20000 && done < 200; ++t) {
    const TypedGraph g = encode(testing::random_multigraph(rng2, 2 + pick(rng2, 4), 7, "h"));
    const Production q = lift_rule(testing::random_multirule(rng2), {"a", "b"}).production;
    const auto ms = find_matches(q, g);
    if (ms.empty()) continue;
    XiExpansion x = xi_expand(q, g, ms[pick(rng2, ms.size())], coin(rng2, 0.3));
    auto trace = derive(x.sequence, g);
    check(trace.has_value(), "expanded sequence not applicable: " + x.sequence.to_string());
    McReport r = check_mc(trace->back());
    check(r.ok, r.violations.empty() ? "constraint lost" : r.violations.front());
    ++done;
  }
  check(done == 200, "only " + std::to_string(done) + " derivations");
  return "printed matrices; 200 round trips; 200 expanded derivations";
}

int run(const std::string& file, std::vector<std::string> args) {
  args.insert(args.begin(), {"-f", file});
  std::ostringstream out, err;
  return cli::run_cli(args, out, err);
}

std::string c10_cli() {
  const std::string plant = std::string(MGG_GRAMMAR_DIR) + "/plant.yaml";
  const std::string multi = std::string(MGG_GRAMMAR_DIR) + "/multigraph.yaml";
  for (const auto& f : {plant, multi}) {
    const doc::GrammarDocument d = doc::load_document(f);
    const std::string text = doc::to_yaml(d);
    const doc::GrammarDocument again = doc::parse_document(text);
    check(again == d && doc::to_yaml(again) == text, "round trip differs for " + f);
  }
  struct Case {
    const std::string& file;
    std::vector<std::string> args;
    int code;
  };
  const std::vector<Case> cases{
      {plant, {"apply", "consume", "plant"}, 0},
      {plant, {"apply", "consume", "busy_plant"}, 1},
      {plant, {"apply", "consume", "nowhere"}, 2},
      {plant, {"derive", "load_then_consume", "plant"}, 0},
      {plant, {"derive", "consume_once", "busy_plant"}, 1},
      {plant, {"check-seq", "consume_once"}, 0},
      {plant, {"congruence", "load_then_consume", "consume_then_load"}, 0},
      {plant, {"satisfies", "plant", "machine_output"}, 0},
      {plant, {"satisfies", "two_machines", "machine_output"}, 1},
      {plant, {"compile-ac", "busy_after", "--host", "two_machines"}, 0},
      {plant, {"compile-ac", "idle_before", "--host", "busy_plant"}, 1},
      {plant, {"pre2post", "feeder"}, 0},
      {plant, {"post2pre", "feeder"}, 2},
      {plant, {"delocalize", "machine_output", "consume_once", "--to", "0"}, 0},
      {plant, {"delocalize", "machine_output", "consume_once", "--to", "4"}, 2},
      {plant, {"export-dot", "plant"}, 0},
      {plant, {"format"}, 0},
      {plant, {"bogus"}, 2},
      {"/nonexistent.yaml", {"format"}, 2},
      {multi, {"multi", "encode", "host"}, 0},
      {multi, {"multi", "decode", "encoded"}, 0},
      {multi, {"multi", "decode", "isolated"}, 1},
      {multi, {"multi", "check", "direct"}, 1},
      {multi, {"multi", "apply", "drop", "host"}, 0},
      {multi, {"multi", "apply", "p", "host", "--match", "9"}, 1},
  };
  for (const auto& c : cases) {
    const int got = run(c.file, c.args);
    std::string cmd;
    for (const auto& a : c.args) cmd += " " + a;
    check(got == c.code, "'" + cmd.substr(1) + "' exited " + std::to_string(got) + ", want " + std::to_string(c.code));
  }
  return "2 documents round-trip; " + std::to_string(cases.size()) + " exit codes";
}

}  // namespace
}  // namespace mgg::acceptance

int main() {
  using namespace mgg::acceptance;
  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria{
      {"rule algebra", c1_rule_algebra},
      {"nihilation", c2_nihilation},
      {"compatibility", c3_compatibility},
      {"sequence analysis", c4_sequences},
      {"condition compilation", c5_compilation},
      {"nac operator order", c6_commutation},
      {"pre/post round trip", c7_round_trip},
      {"delocalization", c8_delocalization},
      {"multidigraphs", c9_multigraph},
      {"cli", c10_cli},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, fn] = criteria[i];
    std::string line;
    try {
      line = "PASS " + std::to_string(i + 1) + " " + name + ": " + fn();
    } catch (const Failure& f) {
      line = "FAIL " + std::to_string(i + 1) + " " + name + ": " + f.what;
      ++failed;
    } catch (const std::exception& e) {
      line = "FAIL " + std::to_string(i + 1) + " " + name + ": unexpected exception: " + e.what();
      ++failed;
    }
    std::cout << line << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
