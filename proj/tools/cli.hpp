#pragma once

// The `mgg` command line. Every subcommand reads one grammar document and
// prints a report: YAML-style text by default, JSON with --json.
// Exit codes: 0 success or the property holds, 1 it fails, 2 bad input.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "document.hpp"
#include "json.hpp"
#include "mgg/dot.hpp"

namespace mgg::cli {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Report pieces

inline Json types_json(const TypeSet& t) {
  if (t.is_fixed()) return *t.types().begin();
  Json a = Json::array();
  for (const auto& x : t.types()) a.push_back(x);
  return a;
}

inline Json map_json(const std::map<std::string, std::string>& m) {
  Json o = Json::object();
  for (const auto& [k, v] : m) o[k] = v;
  return o;
}

inline Json edges_json(const std::vector<Edge>& es) {
  Json a = Json::array();
  for (const auto& [x, y] : es) a.push_back({x, y});
  return a;
}

/// Node list plus adjacency lists; loadable back as a document graph.
inline Json graph_json(const TypedGraph& g) {
  Json nodes = Json::array();
  Json adj = Json::object();
  for (const auto& id : g.node_ids()) {
    const ElemId& e = g.universe()[g.universe().at(id)];
    Json n = {{"id", id}, {"type", types_json(g.type_of(id))}};
    if (!e.label.empty()) n["label"] = e.label;
    nodes.push_back(n);
  }
  for (const auto& [a, b] : g.edge_list()) {
    if (!adj.contains(a)) adj[a] = Json::array();
    adj[a].push_back(b);
  }
  return {{"nodes", nodes}, {"adjacency", adj}};
}

inline Json multigraph_json(const MultiGraph& m) {
  Json nodes = Json::array();
  for (const auto& n : m.nodes) nodes.push_back({{"id", n.id}, {"type", types_json(n.type)}});
  Json edges = Json::array();
  for (const auto& e : m.edges) edges.push_back({{"id", e.id}, {"source", e.source}, {"target", e.target}});
  return {{"nodes", nodes}, {"edges", edges}};
}

inline Json condition_json(const std::string& name, const Condition& c) {
  Json o = {{"name", name}, {"anchor", to_string(c.anchor)}};
  if (c.rule) o["rule"] = c.rule->name;
  if (c.match) o["match"] = map_json(*c.match);
  Json gs = Json::array();
  for (const auto& g : c.graphs) {
    Json x = {{"name", g.base}};
    if (!g.replica.empty()) x["replica"] = g.replica;
    if (!g.piece.empty()) x["piece"] = g.piece;
    if (g.anchor) x["anchor"] = true;
    x.update(graph_json(g.graph));
    if (!g.nihil.is_zero()) {
      std::vector<Edge> es;
      for (auto [i, j] : g.nihil.entries()) es.emplace_back(g.graph.universe()[i].id, g.graph.universe()[j].id);
      x["nihil"] = edges_json(es);
    }
    if (g.pin) x["pin"] = map_json(*g.pin);
    gs.push_back(x);
  }
  o["graphs"] = gs;
  if (!c.morphisms.empty()) {
    Json ms = Json::array();
    for (const auto& m : c.morphisms) ms.push_back({{"from", m.from}, {"to", m.to}, {"map", map_json(m.map)}});
    o["morphisms"] = ms;
  }
  o["formula"] = to_string(c.formula);
  return o;
}

// ---------------------------------------------------------------------------
// Text rendering: JSON values written out as block YAML, small leaves in
// flow style.

namespace detail {

inline bool is_leafy(const Json& j) {
  if (j.is_primitive()) return true;
  if (j.size() > 4) return j.is_array() && std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_primitive(); });
  for (const auto& x : j) {
    if (x.is_primitive()) continue;
    if (x.is_array() && std::all_of(x.begin(), x.end(), [](const Json& y) { return y.is_primitive(); })) continue;
    return false;
  }
  return true;
}

inline void emit(YAML::Emitter& out, const Json& j) {
  if (j.is_null()) {
    out << YAML::Null;
  } else if (j.is_boolean()) {
    out << j.get<bool>();
  } else if (j.is_number_integer()) {
    out << j.get<long long>();
  } else if (j.is_number()) {
    out << j.get<double>();
  } else if (j.is_string()) {
    out << j.get<std::string>();
  } else if (j.is_array()) {
    if (j.empty() || is_leafy(j)) out << YAML::Flow;
    out << YAML::BeginSeq;
    for (const auto& x : j) emit(out, x);
    out << YAML::EndSeq;
  } else {
    if (j.empty() || (is_leafy(j) && j.size() <= 4)) out << YAML::Flow;
    out << YAML::BeginMap;
    for (const auto& [k, v] : j.items()) {
      out << YAML::Key << k << YAML::Value;
      emit(out, v);
    }
    out << YAML::EndMap;
  }
}

}  // namespace detail

inline std::string render(const Json& j, bool json) {
  if (json) return j.dump(2) + "\n";
  YAML::Emitter out;
  detail::emit(out, j);
  return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------
// Commands

struct Result {
  Json report;
  int code = 0;
};

struct Options {
  std::string file;
  bool json = false;
  CompileOptions compile;
};

inline Json sequence_json(const CompletedSequence& s) {
  Json steps = Json::array();
  for (const auto& p : s.steps) steps.push_back(p.name);
  return {{"notation", s.to_string()}, {"steps", steps}};
}

/// The rule given on the command line replaces the condition's own.
inline Condition with_rule(const doc::GrammarDocument& d, Condition c, const std::string& rule) {
  if (rule.empty()) return c;
  if (c.anchor == Anchor::None) throw InputError("a graph constraint takes no rule");
  c.rule = d.rule(rule);
  try {
    validate(c);
  } catch (const ConditionError& e) {
    throw InputError(std::string("condition does not fit rule '") + rule + "': " + e.what());
  }
  return c;
}

inline Result cmd_apply(const doc::GrammarDocument& d, const std::string& rule, const std::string& graph,
                        std::size_t k, bool epsilon) {
  const Production& p = d.rule(rule);
  const TypedGraph& g = d.graph(graph);
  const auto ms = find_matches(p, g);
  Result r;
  r.report = {{"rule", rule}, {"graph", graph}, {"matches", ms.size()}};
  if (k >= ms.size()) {
    r.report["applied"] = false;
    r.report["reason"] = ms.empty() ? "no match" : "match index out of range";
    r.code = 1;
    return r;
  }
  r.report["match"] = map_json(ms[k].node_map);
  try {
    DerivationResult res = epsilon ? apply_with_epsilon(p, g, ms[k]) : apply(p, g, ms[k]);
    r.report["applied"] = true;
    if (!res.epsilon_rules.empty()) r.report["epsilon_deletes"] = edges_json(res.epsilon_rules[0].lhs.edge_list());
    r.report["result"] = graph_json(res.after);
  } catch (const DanglingEdgeError& e) {
    r.report["applied"] = false;
    r.report["reason"] = e.what();
    r.code = 1;
  }
  return r;
}

inline Result cmd_derive(const doc::GrammarDocument& d, const std::string& seq, const std::string& graph) {
  const CompletedSequence s = d.sequence(seq);
  auto trace = derive(s, d.graph(graph));
  Result r;
  r.report = {{"sequence", seq}, {"graph", graph}, {"applicable", trace.has_value()}};
  if (!trace) {
    r.code = 1;
    return r;
  }
  r.report["result"] = graph_json(trace->back());
  return r;
}

inline Result cmd_check_seq(const doc::GrammarDocument& d, const std::string& seq) {
  const CompletedSequence s = d.sequence(seq);
  const SequenceReport a = analyze(s);
  Result r;
  r.report = {{"sequence", seq},
              {"notation", s.to_string()},
              {"coherent", a.coherent},
              {"compatible", a.compatible}};
  if (!a.coherent) r.report["conflicts"] = graph_json(a.conflicts);
  if (!a.compatible) r.report["dangling"] = edges_json(a.dangling);
  r.report["mid"] = graph_json(a.mid);
  r.report["nid"] = graph_json(a.nid);
  r.code = a.coherent && a.compatible ? 0 : 1;
  return r;
}

inline Result cmd_congruence(const doc::GrammarDocument& d, const std::string& s1, const std::string& s2) {
  const Congruence c = g_congruent(d.sequence(s1), d.sequence(s2));
  Result r;
  r.report = {{"first", s1}, {"second", s2}, {"congruent", c.congruent}};
  r.report["mid_difference"] = graph_json(c.mid_delta);
  r.report["nid_difference"] = graph_json(c.nid_delta);
  r.code = c.congruent ? 0 : 1;
  return r;
}

inline Result cmd_satisfies(const doc::GrammarDocument& d, const std::string& graph, const std::string& cond) {
  const bool holds = satisfies(d.graph(graph), d.condition(cond));
  return {{{"graph", graph}, {"condition", cond}, {"holds", holds}}, holds ? 0 : 1};
}

inline Result cmd_compile(const doc::GrammarDocument& d, const std::string& cond, const std::string& rule,
                          const std::string& host, const CompileOptions& opt) {
  const Condition c = with_rule(d, d.condition(cond), rule);
  const TypedGraph& g = d.graph(host);
  const auto seqs = compile_to_sequences(c, g, opt);
  Result r;
  Json list = Json::array();
  bool any = false;
  for (const auto& s : seqs) {
    const bool ok = applicable(s, g);
    any = any || ok;
    Json x = sequence_json(s);
    x["applicable"] = ok;
    list.push_back(x);
  }
  r.report = {{"condition", cond}, {"host", host}, {"count", seqs.size()}, {"sequences", list}, {"holds", any}};
  r.code = any ? 0 : 1;
  return r;
}

inline Result cmd_transport(const doc::GrammarDocument& d, const std::string& cond, const std::string& rule,
                            bool forward) {
  const Condition c = with_rule(d, d.condition(cond), rule);
  if (c.anchor != (forward ? Anchor::Pre : Anchor::Post))
    throw InputError(std::string(forward ? "pre2post" : "post2pre") + " needs a " + (forward ? "pre" : "post") +
                     "condition");
  const Condition t = forward ? pre_to_post(c) : post_to_pre(c);
  return {{{"condition", condition_json(cond + (forward ? "_post" : "_pre"), t)}}, 0};
}

inline Result cmd_delocalize(const doc::GrammarDocument& d, const std::string& cond, const std::string& seq,
                             std::size_t to, std::optional<std::size_t> state) {
  const CompletedSequence s = d.sequence(seq);
  const Condition ac = delocalize(d.condition(cond), s, state.value_or(to), to);
  return {{{"sequence", seq}, {"rule", to}, {"state", state.value_or(to)}, {"condition", condition_json(cond + "_at_" + std::to_string(to), ac)}},
          0};
}

inline std::set<std::string> declared_simple(const doc::GrammarDocument& d) {
  return {d.types.begin(), d.types.end()};
}

inline Result cmd_multi_apply(const doc::GrammarDocument& d, const std::string& rule, const std::string& graph,
                              std::size_t k, bool fused) {
  const LiftedRule lr = lift_rule(d.multirule(rule), declared_simple(d));
  const TypedGraph g = encode(d.multigraph(graph));
  const auto ms = find_matches(lr.production, g);
  Result r;
  r.report = {{"rule", rule}, {"graph", graph}, {"matches", ms.size()}};
  if (k >= ms.size()) {
    r.report["applied"] = false;
    r.report["reason"] = ms.empty() ? "no match" : "match index out of range";
    r.code = 1;
    return r;
  }
  const XiExpansion x = xi_expand(lr.production, g, ms[k], fused);
  r.report["match"] = map_json(ms[k].node_map);
  r.report["chain"] = sequence_json(x.sequence);
  auto trace = derive(x.sequence, g);
  r.report["applied"] = trace.has_value();
  if (!trace) {
    r.code = 1;
    return r;
  }
  r.report["result"] = multigraph_json(decode(trace->back()));
  return r;
}

// ---------------------------------------------------------------------------

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matrix graph grammar toolkit", "mgg"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-f,--file", o.file, "Grammar document (YAML)")->required();
  app.add_flag("--json", o.json, "Print JSON instead of text");
  app.add_option("--budget", o.compile.budget, "Closure instance budget");
  app.add_option("--branch-cap", o.compile.branch_cap, "Maximum DNF branches");

  std::string a1, a2, host;
  std::size_t index = 0;
  std::optional<std::size_t> state;
  bool flag = false;

  auto* apply_c = app.add_subcommand("apply", "Apply a rule at one of its matches");
  apply_c->add_option("rule", a1)->required();
  apply_c->add_option("graph", a2)->required();
  apply_c->add_option("--match", index, "Match index");
  apply_c->add_flag("--epsilon", flag, "Delete dangling edges first");

  auto* derive_c = app.add_subcommand("derive", "Run a sequence on a graph");
  derive_c->add_option("sequence", a1)->required();
  derive_c->add_option("graph", a2)->required();

  auto* check_c = app.add_subcommand("check-seq", "Coherence, compatibility, MID and NID");
  check_c->add_option("sequence", a1)->required();

  auto* cong_c = app.add_subcommand("congruence", "G-congruence of two sequences");
  cong_c->add_option("first", a1)->required();
  cong_c->add_option("second", a2)->required();

  auto* sat_c = app.add_subcommand("satisfies", "Evaluate a condition on a graph");
  sat_c->add_option("graph", a1)->required();
  sat_c->add_option("condition", a2)->required();

  auto* comp_c = app.add_subcommand("compile-ac", "Compile a condition into sequences");
  comp_c->add_option("condition", a1)->required();
  comp_c->add_option("rule", a2);
  comp_c->add_option("--host", host, "Host graph")->required();

  auto* p2p_c = app.add_subcommand("pre2post", "Turn a precondition into a postcondition");
  p2p_c->add_option("condition", a1)->required();
  p2p_c->add_option("rule", a2);
  auto* q2p_c = app.add_subcommand("post2pre", "Turn a postcondition into a precondition");
  q2p_c->add_option("condition", a1)->required();
  q2p_c->add_option("rule", a2);

  auto* deloc_c = app.add_subcommand("delocalize", "Anchor a graph constraint to a rule of a sequence");
  deloc_c->add_option("condition", a1)->required();
  deloc_c->add_option("sequence", a2)->required();
  deloc_c->add_option("--to", index, "Rule index (application order, from 0)")->required();
  deloc_c->add_option("--state", state, "State the constraint speaks about (default: before the rule)");

  auto* multi_c = app.add_subcommand("multi", "Multigraph encoding");
  multi_c->require_subcommand(1);
  auto* enc_c = multi_c->add_subcommand("encode", "Encode a multigraph");
  enc_c->add_option("multigraph", a1)->required();
  auto* dec_c = multi_c->add_subcommand("decode", "Decode an encoded graph");
  dec_c->add_option("graph", a1)->required();
  auto* mcheck_c = multi_c->add_subcommand("check", "Check the multigraph constraint");
  mcheck_c->add_option("graph", a1)->required();
  auto* mapply_c = multi_c->add_subcommand("apply", "Apply a multigraph rule");
  mapply_c->add_option("rule", a1)->required();
  mapply_c->add_option("multigraph", a2)->required();
  mapply_c->add_option("--match", index, "Match index");
  mapply_c->add_flag("--fused", flag, "Fold the edge-clearing rule into the epsilon rule");

  auto* dot_c = app.add_subcommand("export-dot", "Graphviz output of a graph or multigraph");
  dot_c->add_option("graph", a1)->required();

  auto* fmt_c = app.add_subcommand("format", "Print the document in normal form");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const doc::GrammarDocument d = doc::load_document(o.file);
    Result r;
    if (*apply_c) r = cmd_apply(d, a1, a2, index, flag);
    else if (*derive_c) r = cmd_derive(d, a1, a2);
    else if (*check_c) r = cmd_check_seq(d, a1);
    else if (*cong_c) r = cmd_congruence(d, a1, a2);
    else if (*sat_c) r = cmd_satisfies(d, a1, a2);
    else if (*comp_c) r = cmd_compile(d, a1, a2, host, o.compile);
    else if (*p2p_c) r = cmd_transport(d, a1, a2, true);
    else if (*q2p_c) r = cmd_transport(d, a1, a2, false);
    else if (*deloc_c) r = cmd_delocalize(d, a1, a2, index, state);
    else if (*enc_c) r.report = graph_json(encode(d.multigraph(a1)));
    else if (*dec_c || *mcheck_c) {
      const McReport mc = check_mc(d.graph(a1));
      r.report = {{"graph", a1}, {"ok", mc.ok}, {"violations", mc.violations}};
      if (mc.ok && *dec_c) r.report["multigraph"] = multigraph_json(decode(d.graph(a1)));
      r.code = mc.ok ? 0 : 1;
    } else if (*mapply_c) r = cmd_multi_apply(d, a1, a2, index, flag);
    else if (*dot_c) {
      const std::string dot = d.graphs.count(a1) ? to_dot(d.graph(a1), a1) : to_dot(encode(d.multigraph(a1)), a1);
      if (o.json) out << Json{{"dot", dot}}.dump(2) << "\n";
      else out << dot;
      return 0;
    } else if (*fmt_c) {
      out << doc::to_yaml(d);
      return 0;
    }
    out << render(r.report, o.json);
    return r.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const YAML::Exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args), out, err);
}

}  // namespace mgg::cli
