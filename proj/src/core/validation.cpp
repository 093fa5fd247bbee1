#include "riskflow/core/validation.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <unordered_map>

namespace riskflow {

std::string_view to_string(Severity severity) noexcept {
  return severity == Severity::Error ? "error" : "warning";
}

std::string_view to_string(IssueCode code) noexcept {
  switch (code) {
    case IssueCode::DuplicateId: return "DuplicateId";
    case IssueCode::DuplicateEdge: return "DuplicateEdge";
    case IssueCode::DanglingEndpoint: return "DanglingEndpoint";
    case IssueCode::SelfAbstraction: return "SelfAbstraction";
    case IssueCode::AbstractionCycle: return "AbstractionCycle";
    case IssueCode::DimensionMismatch: return "DimensionMismatch";
    case IssueCode::ValueOutOfRange: return "ValueOutOfRange";
    case IssueCode::UnmappedLabel: return "UnmappedLabel";
    case IssueCode::KindMismatch: return "KindMismatch";
    case IssueCode::DependencySelfLoop: return "DependencySelfLoop";
    case IssueCode::UnreachableNode: return "UnreachableNode";
    case IssueCode::UnknownField: return "UnknownField";
  }
  return "Unknown";
}

std::size_t ValidationReport::error_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::Error; }));
}

std::size_t ValidationReport::warning_count() const noexcept {
  return issues.size() - error_count();
}

bool ValidationReport::has(IssueCode code) const noexcept {
  return std::any_of(issues.begin(), issues.end(), [&](const auto& i) { return i.code == code; });
}

void ValidationReport::add(Severity severity, IssueCode code, std::string ref,
                           std::string message) {
  if (severity == Severity::Error) ok = false;
  issues.push_back({severity, code, std::move(ref), std::move(message)});
}

namespace {

using IndexMap = std::unordered_map<std::string_view, std::size_t>;

IndexMap first_index_by_id(const RiskGraph& graph) {
  IndexMap index;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) index.emplace(graph.nodes[i].id, i);
  return index;
}

// Kahn's algorithm over abstraction edges, smallest index first. The order is
// partial when the abstraction subgraph has a cycle.
std::vector<std::size_t> kahn_order(const RiskGraph& graph, const IndexMap& index,
                                    bool skip_self_loops) {
  const std::size_t n = graph.nodes.size();
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : graph.edges) {
    if (e.kind != RelationKind::Abstraction) continue;
    auto s = index.find(e.source);
    auto t = index.find(e.target);
    if (s == index.end() || t == index.end()) continue;
    if (skip_self_loops && s->second == t->second) continue;
    out[s->second].push_back(t->second);
    ++indegree[t->second];
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    auto u = ready.top();
    ready.pop();
    order.push_back(u);
    for (auto v : out[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  return order;
}

}  // namespace

std::optional<std::vector<std::size_t>> abstraction_topological_order(const RiskGraph& graph) {
  auto order = kahn_order(graph, first_index_by_id(graph), /*skip_self_loops=*/false);
  if (order.size() != graph.nodes.size()) return std::nullopt;
  return order;
}

ValidationReport validate_graph(const RiskGraph& graph) {
  ValidationReport report;
  const std::size_t d = graph.dimension();

  std::set<std::string_view> seen_ids;
  for (const auto& node : graph.nodes) {
    if (!seen_ids.insert(node.id).second) {
      report.add(Severity::Error, IssueCode::DuplicateId, node.id,
                 "node id '" + node.id + "' is declared more than once");
    }
    if (node.measured_risk) {
      if (node.measured_risk->size() != d) {
        report.add(Severity::Error, IssueCode::DimensionMismatch, node.id,
                   "measured_risk has " + std::to_string(node.measured_risk->size()) +
                       " components, schema has " + std::to_string(d));
      } else if (!node.measured_risk->in_range()) {
        report.add(Severity::Error, IssueCode::ValueOutOfRange, node.id,
                   "measured_risk components must lie in [0, 1]");
      }
    }
  }

  const IndexMap index = first_index_by_id(graph);
  std::set<EdgeRef> seen_edges;
  for (const auto& e : graph.edges) {
    const std::string ref = e.ref().to_string();
    if (!seen_edges.insert(e.ref()).second) {
      report.add(Severity::Error, IssueCode::DuplicateEdge, ref, "edge is declared more than once");
    }
    for (const auto* endpoint : {&e.source, &e.target}) {
      if (!index.contains(*endpoint)) {
        report.add(Severity::Error, IssueCode::DanglingEndpoint, ref,
                   "endpoint '" + *endpoint + "' is not a declared node");
      }
    }
    auto mapped = graph.concept_map.find(e.label);
    if (mapped == graph.concept_map.end()) {
      report.add(Severity::Error, IssueCode::UnmappedLabel, ref,
                 "relation label '" + e.label + "' has no relation kind");
    } else if (mapped->second != e.kind) {
      report.add(Severity::Error, IssueCode::KindMismatch, ref,
                 "edge kind " + std::string(to_string(e.kind)) + " disagrees with label mapping " +
                     std::string(to_string(mapped->second)));
    }
    if (e.source == e.target) {
      if (e.kind == RelationKind::Abstraction) {
        report.add(Severity::Error, IssueCode::SelfAbstraction, ref,
                   "abstraction edge may not connect a node to itself");
      } else {
        report.add(Severity::Warning, IssueCode::DependencySelfLoop, ref,
                   "dependency self-loop has no effect");
      }
    }
    if (e.importance.size() != d) {
      report.add(Severity::Error, IssueCode::DimensionMismatch, ref,
                 "importance has " + std::to_string(e.importance.size()) +
                     " components, schema has " + std::to_string(d));
    } else if (!e.importance.in_range()) {
      report.add(Severity::Error, IssueCode::ValueOutOfRange, ref,
                 "importance components must lie in [0, 1]");
    }
  }

  if (auto order = kahn_order(graph, index, /*skip_self_loops=*/true);
      order.size() != graph.nodes.size()) {
    std::vector<bool> released(graph.nodes.size(), false);
    for (auto i : order) released[i] = true;
    std::string members;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      if (released[i]) continue;
      if (!members.empty()) members += ", ";
      members += graph.nodes[i].id;
    }
    report.add(Severity::Error, IssueCode::AbstractionCycle, members,
               "abstraction relations form a cycle among: " + members);
  }

  // Nodes that no (abstraction* dependency*) path from a measured node reaches
  // always end up with zero risk.
  const std::size_t n = graph.nodes.size();
  std::vector<std::vector<std::size_t>> abs_out(n), dep_out(n);
  for (const auto& e : graph.edges) {
    auto s = index.find(e.source);
    auto t = index.find(e.target);
    if (s == index.end() || t == index.end()) continue;
    (e.kind == RelationKind::Abstraction ? abs_out : dep_out)[s->second].push_back(t->second);
  }
  std::vector<bool> reached(n, false);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.nodes[i].measured_risk) {
      reached[i] = true;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : abs_out[u]) {
      if (!reached[v]) {
        reached[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (reached[i]) stack.push_back(i);
  }
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : dep_out[u]) {
      if (!reached[v]) {
        reached[v] = true;
        stack.push_back(v);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!reached[i]) {
      report.add(Severity::Warning, IssueCode::UnreachableNode, graph.nodes[i].id,
                 "no measured node reaches '" + graph.nodes[i].id + "'; its risk is zero");
    }
  }

  return report;
}

ValidationError::ValidationError(ValidationReport report)
    : Error([&] {
        std::string msg = "model failed validation";
        for (const auto& issue : report.issues) {
          if (issue.severity != Severity::Error) continue;
          msg += "\n  " + std::string(to_string(issue.code)) + " [" + issue.ref + "]: " +
                 issue.message;
        }
        return msg;
      }()),
      report_(std::move(report)) {}

void require_valid(const RiskGraph& graph) {
  auto report = validate_graph(graph);
  if (!report.ok) throw ValidationError(std::move(report));
}

}  // namespace riskflow
