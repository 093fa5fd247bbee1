#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "riskflow/core/graph.hpp"
#include "riskflow/core/risk_ops.hpp"

namespace riskflow {

/// Directed, followed and total risk of one node. total = max(directed, followed).
struct NodeRisk {
  RiskVector directed;
  RiskVector followed;
  RiskVector total;

  friend bool operator==(const NodeRisk&, const NodeRisk&) = default;
};

/// One explanation of a total-risk component: the measured node it starts
/// from and the edges (abstraction edges first, then dependency edges) that
/// carry it to the explained node. An empty path means the node's own
/// measurement.
struct ProvenanceEntry {
  std::string leaf;
  std::vector<EdgeRef> path;
  double value = 0.0;  // measured[k] times the path's importance[k] product

  friend auto operator<=>(const ProvenanceEntry&, const ProvenanceEntry&) = default;
  friend bool operator==(const ProvenanceEntry&, const ProvenanceEntry&) = default;
};

struct NodeResult {
  std::string id;
  std::string concept_name;
  bool measured = false;
  NodeRisk risk;
  /// causes[k] lists every maximal path for total[k]; empty when total[k] == 0.
  std::vector<std::vector<ProvenanceEntry>> causes;

  friend bool operator==(const NodeResult&, const NodeResult&) = default;
};

enum class Schedule {
  /// Max-priority worklist per perspective; settles each node once.
  Priority,
  /// FIFO worklist in generations (sweeps). Used to cross-check order independence.
  Fifo,
};

struct PropagationStats {
  std::size_t abstraction_visits = 0;
  std::size_t dependency_visits = 0;  // worklist pops that relaxed out-edges
  std::size_t relaxations = 0;        // dependency edge relaxations
  std::size_t sweeps = 0;             // FIFO generations (0 for the priority schedule)
  std::size_t truncated_causes = 0;   // (node, perspective) pairs whose cause list hit the cap

  friend bool operator==(const PropagationStats&, const PropagationStats&) = default;
};

struct PropagationResult {
  PerspectiveSchema schema;
  std::vector<NodeResult> nodes;  // same order as the input graph
  PropagationStats stats;

  const NodeResult* find(std::string_view id) const;
  /// Throws UnknownReference.
  const NodeResult& at(std::string_view id) const;

  friend bool operator==(const PropagationResult&, const PropagationResult&) = default;
};

struct PropagationOptions {
  RiskFunction function = RiskFunction::MaxPerAspect;
  Schedule schedule = Schedule::Priority;
  std::size_t max_causes_per_component = 256;
  double tie_tolerance = 1e-12;
};

struct LeafClassification {
  std::vector<std::string> ids;  // nodes carrying measured risk, graph order
  bool empty_warning = false;    // no node is measured; everything propagates to zero
};

LeafClassification classify_leaves(const RiskGraph& graph);

/// Directed risk of every node: the node's own measurement (if any) maxed with
/// the directed risk of abstraction predecessors scaled by edge importance.
std::map<std::string, RiskVector> propagate_directed(const RiskGraph& graph);

struct FollowedRisk {
  RiskVector followed;
  RiskVector total;
};

/// Least fixpoint of followed/total risk over dependency edges, seeded with
/// total = directed. Measured nodes keep followed = 0.
///
/// Throws IterationLimitExceeded after |V|*d*64 worklist visits, which only
/// happens when an importance above 1 feeds a dependency cycle.
std::map<std::string, FollowedRisk> propagate_followed(
    const RiskGraph& graph, const std::map<std::string, RiskVector>& directed,
    Schedule schedule = Schedule::Priority);

/// Full propagation with provenance. Throws ValidationError on invalid graphs.
PropagationResult propagate(const RiskGraph& graph, const PropagationOptions& options = {});

}  // namespace riskflow
