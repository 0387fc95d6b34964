#pragma once

// Grammar documents: one YAML file holding types, graphs, rules,
// conditions, sequences and their multigraph counterparts.

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mgg/multigraph.hpp"

namespace mgg::doc {

struct GraphEntry {
  TypedGraph graph;
  bool constraint = false;  // may be incompatible

  friend bool operator==(const GraphEntry&, const GraphEntry&) = default;
};

struct RuleEntry {
  TypedGraph lhs;
  TypedGraph rhs;
  Identification identify;
  Production production;

  friend bool operator==(const RuleEntry& a, const RuleEntry& b) {
    return a.lhs == b.lhs && a.rhs == b.rhs && a.identify == b.identify;
  }
};

struct ConditionEntry {
  Condition condition;
  std::string rule;  // empty for graph constraints

  friend bool operator==(const ConditionEntry& a, const ConditionEntry& b) {
    return a.rule == b.rule && a.condition.anchor == b.condition.anchor && a.condition.match == b.condition.match &&
           structurally_equal(a.condition, b.condition);
  }
};

struct SequenceEntry {
  std::vector<std::string> rules;          // application order
  std::vector<Identification> identify;    // per step, local -> global id
  NodeMap binding;                         // global id -> host node

  friend bool operator==(const SequenceEntry&, const SequenceEntry&) = default;
};

struct GrammarDocument {
  std::vector<std::string> types;
  std::map<std::string, GraphEntry> graphs;
  std::map<std::string, MultiGraph> multigraphs;
  std::map<std::string, RuleEntry> rules;
  std::map<std::string, MultiRule> multirules;
  std::map<std::string, ConditionEntry> conditions;
  std::map<std::string, SequenceEntry> sequences;

  friend bool operator==(const GrammarDocument&, const GrammarDocument&) = default;

  template <class T>
  static const T& lookup(const std::map<std::string, T>& m, const std::string& name, const char* what) {
    auto it = m.find(name);
    if (it == m.end()) throw InputError(std::string("unknown ") + what + " '" + name + "'");
    return it->second;
  }
  const TypedGraph& graph(const std::string& n) const { return lookup(graphs, n, "graph").graph; }
  const Production& rule(const std::string& n) const { return lookup(rules, n, "rule").production; }
  const MultiGraph& multigraph(const std::string& n) const { return lookup(multigraphs, n, "multigraph"); }
  const MultiRule& multirule(const std::string& n) const { return lookup(multirules, n, "multirule"); }
  const Condition& condition(const std::string& n) const { return lookup(conditions, n, "condition").condition; }

  CompletedSequence sequence(const std::string& n) const {
    const SequenceEntry& s = lookup(sequences, n, "sequence");
    std::vector<Production> steps;
    for (const auto& r : s.rules) steps.push_back(rule(r));
    CompletedSequence out = complete_sequence(steps, s.identify);
    out.binding = s.binding;
    return out;
  }
};

// ---------------------------------------------------------------------------
// Reading

namespace detail {

inline std::string str(const YAML::Node& n, const std::string& what) {
  if (!n || !n.IsScalar()) throw InputError(what + ": expected a scalar");
  return n.as<std::string>();
}

inline TypeSet type_set(const YAML::Node& n, const std::string& what) {
  if (n && n.IsScalar()) return TypeSet(n.as<std::string>());
  if (n && n.IsSequence() && n.size() > 0) {
    std::set<std::string> ts;
    for (const auto& t : n) ts.insert(str(t, what));
    return TypeSet(std::move(ts));
  }
  throw InputError(what + ": a type or a non-empty list of types is required");
}

inline std::map<std::string, std::string> string_map(const YAML::Node& n, const std::string& what) {
  std::map<std::string, std::string> out;
  if (!n) return out;
  if (!n.IsMap()) throw InputError(what + ": expected a mapping");
  for (const auto& kv : n) out[str(kv.first, what)] = str(kv.second, what);
  return out;
}

inline std::vector<Edge> edge_pairs(const YAML::Node& n, const std::string& what) {
  std::vector<Edge> out;
  if (!n) return out;
  if (!n.IsSequence()) throw InputError(what + ": edges must be a list of [source, target]");
  for (const auto& e : n) {
    if (!e.IsSequence() || e.size() != 2) throw InputError(what + ": an edge is a pair [source, target]");
    out.emplace_back(str(e[0], what), str(e[1], what));
  }
  return out;
}

inline void check_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& what) {
  if (!n.IsMap()) throw InputError(what + ": expected a mapping");
  for (const auto& kv : n) {
    const std::string k = str(kv.first, what);
    if (!allowed.count(k)) throw InputError(what + ": unknown key '" + k + "'");
  }
}

/// Nodes as a list of {id, type[, label]}; edges as pairs, or an
/// adjacency mapping node -> successors.
inline TypedGraph graph(const YAML::Node& n, const std::string& what,
                        const std::set<std::string>& extra_keys = {}) {
  std::set<std::string> keys{"nodes", "edges", "adjacency"};
  keys.insert(extra_keys.begin(), extra_keys.end());
  check_keys(n, keys, what);
  GraphBuilder b;
  if (n["nodes"]) {
    if (!n["nodes"].IsSequence()) throw InputError(what + ": nodes must be a list");
    for (const auto& x : n["nodes"]) {
      check_keys(x, {"id", "type", "label"}, what);
      std::string label = x["label"] ? str(x["label"], what) : "";
      b.node(ElemId(str(x["id"], what), label), type_set(x["type"], what + " node"));
    }
  }
  for (const auto& [a, c] : edge_pairs(n["edges"], what)) b.edge(a, c);
  if (const auto adj = n["adjacency"]) {
    if (!adj.IsMap()) throw InputError(what + ": adjacency must map nodes to successor lists");
    for (const auto& kv : adj) {
      if (!kv.second.IsSequence()) throw InputError(what + ": adjacency must map nodes to successor lists");
      for (const auto& t : kv.second) b.edge(str(kv.first, what), str(t, what));
    }
  }
  return b.build();
}

inline MultiGraph multigraph(const YAML::Node& n, const std::string& what, bool named = false) {
  if (named) check_keys(n, {"name", "nodes", "edges"}, what);
  else check_keys(n, {"nodes", "edges"}, what);
  MultiGraph m;
  if (n["nodes"]) {
    if (!n["nodes"].IsSequence()) throw InputError(what + ": nodes must be a list");
    for (const auto& x : n["nodes"]) {
      check_keys(x, {"id", "type"}, what);
      m.node(str(x["id"], what), type_set(x["type"], what + " node"));
    }
  }
  if (n["edges"]) {
    if (!n["edges"].IsSequence()) throw InputError(what + ": edges must be a list");
    for (const auto& e : n["edges"]) {
      check_keys(e, {"id", "source", "target"}, what);
      m.edge(str(e["id"], what), str(e["source"], what), str(e["target"], what));
    }
  }
  validate(m);
  return m;
}

inline Anchor anchor(const std::string& s, const std::string& what) {
  if (s == "none") return Anchor::None;
  if (s == "pre") return Anchor::Pre;
  if (s == "post") return Anchor::Post;
  throw InputError(what + ": anchor must be none, pre or post");
}

inline DiagramGraph diagram_graph(const YAML::Node& n, const std::string& what) {
  DiagramGraph g(str(n["name"], what), graph(n, what, {"name", "replica", "piece", "nihil", "pin", "anchor"}));
  const std::string w = what + " graph '" + g.base + "'";
  if (n["replica"]) {
    if (!n["replica"].IsSequence()) throw InputError(w + ": replica must be a list of integers");
    for (const auto& i : n["replica"]) g.replica.push_back(i.as<int>());
  }
  if (n["piece"]) g.piece = str(n["piece"], w);
  for (const auto& [a, b] : edge_pairs(n["nihil"], w)) {
    if (!g.graph.universe().contains(a) || !g.graph.universe().contains(b))
      throw InputError(w + ": nihil edge (" + a + "," + b + ") refers to an unknown node");
    g.nihil.set(a, b);
  }
  if (n["pin"]) g.pin = string_map(n["pin"], w);
  if (n["anchor"]) g.anchor = n["anchor"].as<bool>();
  return g;
}

}  // namespace detail

inline GrammarDocument parse_document(const std::string& text) {
  GrammarDocument d;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw InputError(std::string("YAML: ") + e.what());
  }
  if (root.IsNull()) return d;
  using namespace detail;
  try {
    check_keys(root, {"types", "graphs", "multigraphs", "rules", "multirules", "conditions", "sequences"}, "document");
    std::set<std::string> names;
    auto entries = [&](const char* section) {
      std::vector<std::pair<std::string, YAML::Node>> out;
      const YAML::Node s = root[section];
      if (!s) return out;
      if (!s.IsSequence()) throw InputError(std::string(section) + ": expected a list");
      for (const auto& e : s) {
        if (!e.IsMap()) throw InputError(std::string(section) + ": each entry is a mapping");
        const std::string name = str(e["name"], std::string(section) + " entry name");
        if (!names.insert(name).second) throw InputError("duplicate name '" + name + "'");
        out.emplace_back(name, e);
      }
      return out;
    };
    if (root["types"]) {
      if (!root["types"].IsSequence()) throw InputError("types: expected a list");
      for (const auto& t : root["types"]) d.types.push_back(str(t, "types"));
    }
    const std::set<std::string> declared(d.types.begin(), d.types.end());
    auto check_types = [&](const TypedGraph& g, const std::string& what) {
      if (declared.empty()) return;
      for (const auto& id : g.node_ids())
        for (const auto& t : g.type_of(id).types())
          if (t != kMultinodeType && !declared.count(t))
            throw InputError(what + ": node '" + id + "' has undeclared type '" + t + "'");
    };

    for (const auto& [name, e] : entries("graphs")) {
      const std::string w = "graph '" + name + "'";
      GraphEntry g{graph(e, w, {"name", "constraint"}), e["constraint"] && e["constraint"].as<bool>()};
      check_types(g.graph, w);
      if (!g.constraint && !compatible(g.graph)) throw InputError(w + " is not compatible");
      d.graphs.emplace(name, std::move(g));
    }
    for (const auto& [name, e] : entries("multigraphs")) {
      MultiGraph m = multigraph(e, "multigraph '" + name + "'", true);
      check_types(encode(m), "multigraph '" + name + "'");
      d.multigraphs.emplace(name, std::move(m));
    }
    for (const auto& [name, e] : entries("rules")) {
      const std::string w = "rule '" + name + "'";
      check_keys(e, {"name", "lhs", "rhs", "identify"}, w);
      RuleEntry r;
      r.lhs = graph(e["lhs"], w + " lhs");
      r.rhs = graph(e["rhs"], w + " rhs");
      r.identify = string_map(e["identify"], w);
      check_types(r.lhs, w);
      check_types(r.rhs, w);
      r.production = from_static(name, r.lhs, r.rhs, r.identify);
      d.rules.emplace(name, std::move(r));
    }
    for (const auto& [name, e] : entries("multirules")) {
      const std::string w = "multirule '" + name + "'";
      check_keys(e, {"name", "lhs", "rhs"}, w);
      MultiRule r{name, multigraph(e["lhs"], w + " lhs"), multigraph(e["rhs"], w + " rhs")};
      check_types(encode(r.lhs), w);
      check_types(encode(r.rhs), w);
      lift_rule(r);  // rejects rules that move edges
      d.multirules.emplace(name, std::move(r));
    }
    for (const auto& [name, e] : entries("conditions")) {
      const std::string w = "condition '" + name + "'";
      check_keys(e, {"name", "anchor", "rule", "match", "graphs", "morphisms", "formula"}, w);
      ConditionEntry c;
      c.condition.anchor = e["anchor"] ? anchor(str(e["anchor"], w), w) : Anchor::None;
      if (e["rule"]) {
        c.rule = str(e["rule"], w);
        c.condition.rule = d.rule(c.rule);
      }
      if (c.condition.anchor != Anchor::None && c.rule.empty()) throw InputError(w + ": anchored condition without a rule");
      if (e["match"]) c.condition.match = string_map(e["match"], w);
      if (e["graphs"]) {
        if (!e["graphs"].IsSequence()) throw InputError(w + ": graphs must be a list");
        for (const auto& g : e["graphs"]) c.condition.graphs.push_back(diagram_graph(g, w));
      }
      if (e["morphisms"]) {
        if (!e["morphisms"].IsSequence()) throw InputError(w + ": morphisms must be a list");
        for (const auto& m : e["morphisms"]) {
          check_keys(m, {"from", "to", "map"}, w);
          c.condition.morphisms.push_back({str(m["from"], w), str(m["to"], w), string_map(m["map"], w)});
        }
      }
      c.condition.formula = parse_formula(str(e["formula"], w + " formula"));
      try {
        validate(c.condition);
      } catch (const ConditionError& x) {
        throw InputError(w + ": " + x.what());
      }
      d.conditions.emplace(name, std::move(c));
    }
    for (const auto& [name, e] : entries("sequences")) {
      const std::string w = "sequence '" + name + "'";
      check_keys(e, {"name", "rules", "identify", "binding"}, w);
      SequenceEntry s;
      if (!e["rules"] || !e["rules"].IsSequence()) throw InputError(w + ": rules must be a list");
      for (const auto& r : e["rules"]) {
        s.rules.push_back(str(r, w));
        d.rule(s.rules.back());
      }
      if (e["identify"]) {
        if (!e["identify"].IsSequence() || e["identify"].size() != s.rules.size())
          throw InputError(w + ": identify needs one mapping per rule");
        for (const auto& m : e["identify"]) s.identify.push_back(string_map(m, w));
      }
      s.binding = string_map(e["binding"], w);
      d.sequences.emplace(name, std::move(s));
    }
  } catch (const YAML::Exception& e) {
    throw InputError(std::string("YAML: ") + e.what());
  } catch (const TypeClashError& e) {
    throw InputError(e.what());
  }
  return d;
}

inline GrammarDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

// ---------------------------------------------------------------------------
// Writing

namespace detail {

inline void emit_types(YAML::Emitter& out, const TypeSet& t) {
  if (t.is_fixed()) {
    out << *t.types().begin();
    return;
  }
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : t.types()) out << x;
  out << YAML::EndSeq;
}

inline void emit_edges(YAML::Emitter& out, const std::vector<Edge>& es) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& [a, b] : es) out << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
  out << YAML::EndSeq;
}

/// Graph body (keys only, inside an open map).
inline void emit_graph_body(YAML::Emitter& out, const TypedGraph& g) {
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& id : g.node_ids()) {
    const ElemId& e = g.universe()[g.universe().at(id)];
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << id << YAML::Key << "type"
        << YAML::Value;
    emit_types(out, g.type_of(id));
    if (!e.label.empty()) out << YAML::Key << "label" << YAML::Value << e.label;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "edges" << YAML::Value;
  emit_edges(out, g.edge_list());
}

inline void emit_graph(YAML::Emitter& out, const TypedGraph& g) {
  out << YAML::BeginMap;
  emit_graph_body(out, g);
  out << YAML::EndMap;
}

inline void emit_map(YAML::Emitter& out, const std::map<std::string, std::string>& m) {
  out << YAML::Flow << YAML::BeginMap;
  for (const auto& [k, v] : m) out << YAML::Key << k << YAML::Value << v;
  out << YAML::EndMap;
}

inline void emit_multigraph_body(YAML::Emitter& out, const MultiGraph& m) {
  out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : m.nodes) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << n.id << YAML::Key << "type"
        << YAML::Value;
    emit_types(out, n.type);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
  for (const auto& e : m.edges)
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << e.id << YAML::Key << "source"
        << YAML::Value << e.source << YAML::Key << "target" << YAML::Value << e.target << YAML::EndMap;
  out << YAML::EndSeq;
}

}  // namespace detail

/// Condition as a document entry (inside an open sequence).
inline void emit_condition(YAML::Emitter& out, const std::string& name, const Condition& c, const std::string& rule) {
  using namespace detail;
  out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << name;
  out << YAML::Key << "anchor" << YAML::Value << to_string(c.anchor);
  if (!rule.empty()) out << YAML::Key << "rule" << YAML::Value << rule;
  if (c.match) {
    out << YAML::Key << "match" << YAML::Value;
    emit_map(out, *c.match);
  }
  out << YAML::Key << "graphs" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : c.graphs) {
    out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << g.base;
    if (!g.replica.empty()) {
      out << YAML::Key << "replica" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (int i : g.replica) out << i;
      out << YAML::EndSeq;
    }
    if (!g.piece.empty()) out << YAML::Key << "piece" << YAML::Value << g.piece;
    if (g.anchor) out << YAML::Key << "anchor" << YAML::Value << true;
    emit_graph_body(out, g.graph);
    if (!g.nihil.is_zero()) {
      std::vector<Edge> es;
      for (auto [i, j] : g.nihil.entries()) es.emplace_back(g.graph.universe()[i].id, g.graph.universe()[j].id);
      out << YAML::Key << "nihil" << YAML::Value;
      emit_edges(out, es);
    }
    if (g.pin) {
      out << YAML::Key << "pin" << YAML::Value;
      emit_map(out, *g.pin);
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (!c.morphisms.empty()) {
    out << YAML::Key << "morphisms" << YAML::Value << YAML::BeginSeq;
    for (const auto& m : c.morphisms) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "from" << YAML::Value << m.from << YAML::Key << "to"
          << YAML::Value << m.to << YAML::Key << "map" << YAML::Value;
      emit_map(out, m.map);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::Key << "formula" << YAML::Value << YAML::DoubleQuoted << to_string(c.formula);
  out << YAML::EndMap;
}

inline std::string to_yaml(const GrammarDocument& d) {
  using namespace detail;
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (!d.types.empty()) {
    out << YAML::Key << "types" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& t : d.types) out << t;
    out << YAML::EndSeq;
  }
  if (!d.graphs.empty()) {
    out << YAML::Key << "graphs" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, g] : d.graphs) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << name;
      if (g.constraint) out << YAML::Key << "constraint" << YAML::Value << true;
      emit_graph_body(out, g.graph);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (!d.multigraphs.empty()) {
    out << YAML::Key << "multigraphs" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, m] : d.multigraphs) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << name;
      emit_multigraph_body(out, m);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (!d.rules.empty()) {
    out << YAML::Key << "rules" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, r] : d.rules) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << name;
      out << YAML::Key << "lhs" << YAML::Value;
      emit_graph(out, r.lhs);
      out << YAML::Key << "rhs" << YAML::Value;
      emit_graph(out, r.rhs);
      if (!r.identify.empty()) {
        out << YAML::Key << "identify" << YAML::Value;
        emit_map(out, r.identify);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (!d.multirules.empty()) {
    out << YAML::Key << "multirules" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, r] : d.multirules) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << name;
      out << YAML::Key << "lhs" << YAML::Value << YAML::BeginMap;
      emit_multigraph_body(out, r.lhs);
      out << YAML::EndMap << YAML::Key << "rhs" << YAML::Value << YAML::BeginMap;
      emit_multigraph_body(out, r.rhs);
      out << YAML::EndMap << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (!d.conditions.empty()) {
    out << YAML::Key << "conditions" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, c] : d.conditions) emit_condition(out, name, c.condition, c.rule);
    out << YAML::EndSeq;
  }
  if (!d.sequences.empty()) {
    out << YAML::Key << "sequences" << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, s] : d.sequences) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << name;
      out << YAML::Key << "rules" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (const auto& r : s.rules) out << r;
      out << YAML::EndSeq;
      if (!s.identify.empty()) {
        out << YAML::Key << "identify" << YAML::Value << YAML::BeginSeq;
        for (const auto& m : s.identify) emit_map(out, m);
        out << YAML::EndSeq;
      }
      if (!s.binding.empty()) {
        out << YAML::Key << "binding" << YAML::Value;
        emit_map(out, s.binding);
      }
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace mgg::doc
