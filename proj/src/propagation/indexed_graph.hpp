#pragma once

#include <string_view>
#include <unordered_map>
#include <vector>

#include "riskflow/core/graph.hpp"

namespace riskflow::detail {

// Adjacency view of a validated graph. Edge lists hold indices into
// graph.edges; node indices follow graph.nodes.
struct IndexedGraph {
  explicit IndexedGraph(const RiskGraph& g) : graph(g), dimension(g.dimension()) {
    const std::size_t n = g.nodes.size();
    index.reserve(n);
    for (std::size_t i = 0; i < n; ++i) index.emplace(g.nodes[i].id, i);
    abstraction_in.resize(n);
    dependency_in.resize(n);
    dependency_out.resize(n);
    source.resize(g.edges.size());
    target.resize(g.edges.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      source[e] = index.at(g.edges[e].source);
      target[e] = index.at(g.edges[e].target);
      if (g.edges[e].kind == RelationKind::Abstraction) {
        abstraction_in[target[e]].push_back(e);
      } else {
        dependency_in[target[e]].push_back(e);
        dependency_out[source[e]].push_back(e);
      }
    }
  }

  std::size_t size() const noexcept { return graph.nodes.size(); }
  bool measured(std::size_t node) const { return graph.nodes[node].measured_risk.has_value(); }
  double weight(std::size_t edge, std::size_t k) const { return graph.edges[edge].importance[k]; }

  const RiskGraph& graph;
  std::size_t dimension;
  std::unordered_map<std::string_view, std::size_t> index;
  std::vector<std::vector<std::size_t>> abstraction_in;
  std::vector<std::vector<std::size_t>> dependency_in;
  std::vector<std::vector<std::size_t>> dependency_out;
  std::vector<std::size_t> source;
  std::vector<std::size_t> target;
};

// Row-major |V| x d matrix of risk components.
struct RiskTable {
  RiskTable(std::size_t nodes, std::size_t d) : dimension(d), values(nodes * d, 0.0) {}

  double& at(std::size_t node, std::size_t k) { return values[node * dimension + k]; }
  double at(std::size_t node, std::size_t k) const { return values[node * dimension + k]; }

  std::vector<double> row(std::size_t node) const {
    auto first = values.begin() + static_cast<std::ptrdiff_t>(node * dimension);
    return {first, first + static_cast<std::ptrdiff_t>(dimension)};
  }

  std::size_t dimension;
  std::vector<double> values;
};

}  // namespace riskflow::detail
