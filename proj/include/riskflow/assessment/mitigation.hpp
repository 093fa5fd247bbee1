#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "riskflow/core/graph.hpp"

namespace riskflow {

struct ZeroMeasuredRisk {
  std::string node;
  friend bool operator==(const ZeroMeasuredRisk&, const ZeroMeasuredRisk&) = default;
};

struct SetMeasuredRisk {
  std::string node;
  RiskVector risk;
  friend bool operator==(const SetMeasuredRisk&, const SetMeasuredRisk&) = default;
};

struct SetImportance {
  EdgeRef edge;
  ImportanceVector importance;
  friend bool operator==(const SetImportance&, const SetImportance&) = default;
};

struct RemoveNode {
  std::string node;
  friend bool operator==(const RemoveNode&, const RemoveNode&) = default;
};

struct RemoveEdge {
  EdgeRef edge;
  friend bool operator==(const RemoveEdge&, const RemoveEdge&) = default;
};

/// A what-if edit of the model. Mitigations are model edits, never overrides
/// of computed risk, so every answer comes from a full re-propagation.
using MitigationAction =
    std::variant<ZeroMeasuredRisk, SetMeasuredRisk, SetImportance, RemoveNode, RemoveEdge>;

struct MitigationOutcome {
  RiskGraph graph;
  /// Edges dropped because a RemoveNode action removed one of their endpoints.
  std::vector<EdgeRef> cascaded_edges;
};

/// Applies the actions in order to a copy of `graph`.
///
/// Throws UnknownReference for missing nodes or edges, DimensionMismatch for
/// vectors of the wrong length, and ActionWouldInvalidate if the edited graph
/// fails validation. ZeroMeasuredRisk on an unmeasured node changes nothing.
MitigationOutcome apply_mitigation(const RiskGraph& graph, std::span<const MitigationAction> actions);

/// True when the action can only lower risk: zeroing, removals, and
/// componentwise decreases of an existing measurement or importance.
bool is_pure_mitigation(const RiskGraph& graph, const MitigationAction& action);

/// Shell syntax:
///   zero:<node>
///   risk:<node>=v1,v2,...
///   importance:<src>-><dst>#<label>=w1,w2,...
///   remove-node:<node>
///   remove-edge:<src>-><dst>#<label>
MitigationAction parse_action(std::string_view spec);
std::string format_action(const MitigationAction& action);

}  // namespace riskflow
