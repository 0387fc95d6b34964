#pragma once

// Graphviz output. Multinodes are filled squares, simple nodes circles.

#include <sstream>
#include <string>

#include "mgg/multigraph.hpp"

namespace mgg {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string to_dot(const TypedGraph& g, const std::string& name = "G") {
  std::ostringstream os;
  os << "digraph " << detail::dot_quote(name) << " {\n";
  for (const auto& id : g.node_ids()) {
    const ElemId& e = g.universe()[g.universe().at(id)];
    os << "  " << detail::dot_quote(id);
    if (is_multinode(g, id))
      os << " [shape=square, style=filled, fillcolor=black, fontcolor=white, label=" << detail::dot_quote(e.display())
         << "]";
    else
      os << " [shape=circle, label=" << detail::dot_quote(e.display() + ":" + g.type_of(id).to_string()) << "]";
    os << ";\n";
  }
  for (const auto& [a, b] : g.edge_list()) os << "  " << detail::dot_quote(a) << " -> " << detail::dot_quote(b) << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace mgg
