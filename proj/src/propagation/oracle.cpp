#include "riskflow/propagation/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "riskflow/core/errors.hpp"
#include "riskflow/core/validation.hpp"

namespace riskflow {
namespace {

constexpr double kTie = 1e-12;

struct PathVisit {
  std::size_t leaf;
  std::size_t node;
  bool has_dependency;
  std::vector<double> value;
  std::vector<const RelationEdge*> edges;
};

// Depth-first enumeration of all admissible simple paths out of every measured
// node. The visitor sees each path once, including the empty path.
class PathEnumerator {
 public:
  explicit PathEnumerator(const RiskGraph& graph) : graph_(graph) {
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      for (const auto& e : graph.edges) {
        if (e.source == graph.nodes[i].id) out_[i].push_back(&e);
      }
    }
  }

  template <typename Visitor>
  void for_each_path(Visitor&& visit) {
    for (std::size_t m = 0; m < graph_.nodes.size(); ++m) {
      const auto& measured = graph_.nodes[m].measured_risk;
      if (!measured) continue;
      std::vector<bool> visited(graph_.nodes.size(), false);
      PathVisit path{m, m, false, measured->to_vector(), {}};
      walk(path, visited, visit);
    }
  }

 private:
  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < graph_.nodes.size(); ++i) {
      if (graph_.nodes[i].id == id) return i;
    }
    throw UnknownReference("unknown node '" + id + "'");
  }

  template <typename Visitor>
  void walk(PathVisit& path, std::vector<bool>& visited, Visitor& visit) {
    visited[path.node] = true;
    visit(path);
    const std::size_t here = path.node;
    const bool had_dependency = path.has_dependency;
    for (const auto* e : out_[here]) {
      const std::size_t next = index_of(e->target);
      if (visited[next]) continue;
      if (e->kind == RelationKind::Abstraction && had_dependency) continue;
      if (e->kind == RelationKind::Dependency && graph_.nodes[next].measured_risk) continue;
      const auto saved = path.value;
      for (std::size_t k = 0; k < path.value.size(); ++k) path.value[k] *= e->importance[k];
      path.node = next;
      path.has_dependency = had_dependency || e->kind == RelationKind::Dependency;
      path.edges.push_back(e);
      walk(path, visited, visit);
      path.edges.pop_back();
      path.value = saved;
      path.node = here;
      path.has_dependency = had_dependency;
    }
    visited[here] = false;
  }

  const RiskGraph& graph_;
  std::map<std::size_t, std::vector<const RelationEdge*>> out_;
};

}  // namespace

PropagationResult oracle_propagate(const RiskGraph& graph) {
  if (graph.nodes.size() > kOracleMaxNodes) {
    throw GraphTooLarge("oracle accepts at most " + std::to_string(kOracleMaxNodes) +
                        " nodes, got " + std::to_string(graph.nodes.size()));
  }
  require_valid(graph);
  const std::size_t n = graph.nodes.size();
  const std::size_t d = graph.dimension();

  // TR from simple paths alone; a loop back through n never beats its prefix.
  std::vector<std::vector<double>> dr(n, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> tr(n, std::vector<double>(d, 0.0));
  PathEnumerator paths(graph);
  paths.for_each_path([&](const PathVisit& p) {
    for (std::size_t k = 0; k < d; ++k) {
      if (!p.has_dependency) dr[p.node][k] = std::max(dr[p.node][k], p.value[k]);
      tr[p.node][k] = std::max(tr[p.node][k], p.value[k]);
    }
  });

  // FR is one dependency step from a predecessor's TR, as in the fixpoint
  // equation. On a cycle this may count n's own risk coming back around.
  std::vector<std::vector<double>> fr(n, std::vector<double>(d, 0.0));
  for (const auto& e : graph.edges) {
    if (e.kind != RelationKind::Dependency) continue;
    std::size_t s = n, t = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (graph.nodes[i].id == e.source) s = i;
      if (graph.nodes[i].id == e.target) t = i;
    }
    if (graph.nodes[t].measured_risk) continue;
    for (std::size_t k = 0; k < d; ++k) fr[t][k] = std::max(fr[t][k], tr[s][k] * e.importance[k]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) tr[i][k] = std::max(dr[i][k], fr[i][k]);
  }

  PropagationResult result{graph.schema, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    NodeResult node;
    node.id = graph.nodes[i].id;
    node.concept_name = graph.nodes[i].concept_name;
    node.measured = graph.nodes[i].measured_risk.has_value();
    node.risk = {RiskVector::unchecked(dr[i]), RiskVector::unchecked(fr[i]),
                 RiskVector::unchecked(tr[i])};
    node.causes.resize(d);
    result.nodes.push_back(std::move(node));
  }

  paths.for_each_path([&](const PathVisit& p) {
    auto& node = result.nodes[p.node];
    for (std::size_t k = 0; k < d; ++k) {
      if (tr[p.node][k] <= 0.0 || std::abs(p.value[k] - tr[p.node][k]) > kTie) continue;
      ProvenanceEntry entry{graph.nodes[p.leaf].id, {}, p.value[k]};
      for (const auto* e : p.edges) entry.path.push_back(e->ref());
      node.causes[k].push_back(std::move(entry));
    }
  });
  for (auto& node : result.nodes) {
    for (auto& list : node.causes) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }
  return result;
}

}  // namespace riskflow
