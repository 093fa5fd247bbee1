#include "riskflow/core/graph.hpp"

#include <algorithm>

#include "riskflow/core/errors.hpp"

namespace riskflow {

std::string_view to_string(RelationKind kind) noexcept {
  return kind == RelationKind::Abstraction ? "abstraction" : "dependency";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view text) noexcept {
  if (text == "abstraction") return RelationKind::Abstraction;
  if (text == "dependency") return RelationKind::Dependency;
  return std::nullopt;
}

std::string EdgeRef::to_string() const { return source + "->" + target + "#" + label; }

EdgeRef EdgeRef::parse(std::string_view text) {
  auto arrow = text.find("->");
  auto hash = text.rfind('#');
  if (arrow == std::string_view::npos || hash == std::string_view::npos || hash < arrow + 2) {
    throw Error("malformed edge reference '" + std::string(text) +
                "', expected source->target#label");
  }
  EdgeRef ref{std::string(text.substr(0, arrow)),
              std::string(text.substr(arrow + 2, hash - arrow - 2)),
              std::string(text.substr(hash + 1))};
  if (ref.source.empty() || ref.target.empty() || ref.label.empty()) {
    throw Error("malformed edge reference '" + std::string(text) +
                "', expected source->target#label");
  }
  return ref;
}

const ElementAtRisk* RiskGraph::find_node(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const auto& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

ElementAtRisk* RiskGraph::find_node(std::string_view id) {
  return const_cast<ElementAtRisk*>(std::as_const(*this).find_node(id));
}

const RelationEdge* RiskGraph::find_edge(const EdgeRef& ref) const {
  auto it = std::find_if(edges.begin(), edges.end(), [&](const auto& e) {
    return e.source == ref.source && e.target == ref.target && e.label == ref.label;
  });
  return it == edges.end() ? nullptr : &*it;
}

RelationEdge* RiskGraph::find_edge(const EdgeRef& ref) {
  return const_cast<RelationEdge*>(std::as_const(*this).find_edge(ref));
}

}  // namespace riskflow
