#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "riskflow/propagation/propagation.hpp"

namespace riskflow {

/// A total-risk component at or above its cardinal-risk threshold.
struct Alert {
  std::string node;
  std::string perspective;
  double value = 0.0;
  double threshold = 0.0;
  double margin = 0.0;  // value - threshold, never negative

  friend bool operator==(const Alert&, const Alert&) = default;
};

using Thresholds = std::map<std::string, double, std::less<>>;

/// One alert per (node, perspective) with total >= threshold and total > 0,
/// sorted by margin descending, then node id, then perspective order.
/// Perspectives without a threshold never alert. Thresholds above 1 are
/// accepted and can never be reached.
///
/// Throws UnknownPerspective, or OutOfRange for negative / non-finite thresholds.
std::vector<Alert> assess(const PropagationResult& result, const Thresholds& thresholds);

struct RootCause {
  std::string leaf;
  std::vector<EdgeRef> path;
  double value = 0.0;
};

/// Measured nodes behind total[perspective] of `node`, one entry per leaf
/// (shortest recorded path), sorted by value descending then leaf id.
std::vector<RootCause> root_causes(const PropagationResult& result, std::string_view node,
                                   std::string_view perspective);

/// Distinct leaves behind any perspective of `node`.
std::vector<std::string> root_cause_leaves(const PropagationResult& result, std::string_view node);

struct RankedNode {
  std::string id;
  std::string concept_name;
  double value = 0.0;
};

/// The k highest total[perspective] values, ties broken by node id. An empty
/// concept filter keeps every node.
std::vector<RankedNode> top_k(const PropagationResult& result, std::size_t k,
                              std::string_view perspective,
                              std::optional<std::string_view> concept_filter = std::nullopt);

struct NodeDelta {
  std::string id;
  std::vector<double> before;
  std::vector<double> after;
  std::vector<double> delta;  // after - before
};

/// Change of total risk between two propagation results.
struct RiskDelta {
  PerspectiveSchema schema;
  std::vector<NodeDelta> nodes;                              // present in both, before order
  std::vector<std::pair<std::string, RiskVector>> before_only;  // total risk before removal
  std::vector<std::pair<std::string, RiskVector>> after_only;
  std::vector<double> max_abs_delta;                         // per perspective

  /// Largest positive delta over all nodes and perspectives (0 when none).
  double max_increase() const noexcept;
};

/// Throws SchemaMismatch when the perspective lists differ.
RiskDelta diff_results(const PropagationResult& before, const PropagationResult& after);

}  // namespace riskflow
