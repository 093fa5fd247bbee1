#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskflow/core/perspectives.hpp"
#include "riskflow/core/vectors.hpp"

namespace riskflow {

enum class RelationKind { Abstraction, Dependency };

std::string_view to_string(RelationKind kind) noexcept;
/// Accepts "abstraction" and "dependency".
std::optional<RelationKind> relation_kind_from_string(std::string_view text) noexcept;

/// An object or process instance that can bear risk.
struct ElementAtRisk {
  std::string id;
  std::string concept_name;  // domain label, e.g. "CyberAsset"
  std::optional<RiskVector> measured_risk;

  friend bool operator==(const ElementAtRisk&, const ElementAtRisk&) = default;
};

/// Identifies an edge by its endpoints and relation label. Rendered as
/// `source->target#label`.
struct EdgeRef {
  std::string source;
  std::string target;
  std::string label;

  std::string to_string() const;
  /// Parses `source->target#label`; throws riskflow::Error when malformed.
  static EdgeRef parse(std::string_view text);

  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

/// Directed labeled relation. Risk flows from source to target.
struct RelationEdge {
  std::string source;
  std::string target;
  std::string label;
  RelationKind kind = RelationKind::Abstraction;
  ImportanceVector importance;

  EdgeRef ref() const { return {source, target, label}; }

  friend bool operator==(const RelationEdge&, const RelationEdge&) = default;
};

using ConceptMap = std::map<std::string, RelationKind, std::less<>>;

struct RiskGraph {
  PerspectiveSchema schema;
  std::vector<ElementAtRisk> nodes;
  std::vector<RelationEdge> edges;
  ConceptMap concept_map;

  std::size_t dimension() const noexcept { return schema.dimension(); }

  const ElementAtRisk* find_node(std::string_view id) const;
  ElementAtRisk* find_node(std::string_view id);
  const RelationEdge* find_edge(const EdgeRef& ref) const;
  RelationEdge* find_edge(const EdgeRef& ref);

  friend bool operator==(const RiskGraph&, const RiskGraph&) = default;
};

}  // namespace riskflow
