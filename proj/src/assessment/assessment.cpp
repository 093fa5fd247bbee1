#include "riskflow/assessment/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "riskflow/core/errors.hpp"

namespace riskflow {

std::vector<Alert> assess(const PropagationResult& result, const Thresholds& thresholds) {
  std::vector<std::pair<std::size_t, double>> active;  // (perspective index, threshold)
  for (const auto& [name, threshold] : thresholds) {
    const auto k = result.schema.require_index(name);
    if (!std::isfinite(threshold) || threshold < 0.0) {
      throw OutOfRange("threshold for '" + name + "' must be a non-negative number");
    }
    active.emplace_back(k, threshold);
  }
  std::sort(active.begin(), active.end());

  std::vector<Alert> alerts;
  for (const auto& node : result.nodes) {
    for (const auto& [k, threshold] : active) {
      const double value = node.risk.total[k];
      if (value > 0.0 && value >= threshold) {
        alerts.push_back({node.id, result.schema.name(k), value, threshold, value - threshold});
      }
    }
  }
  std::stable_sort(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
    if (a.margin != b.margin) return a.margin > b.margin;
    return a.node < b.node;
  });
  return alerts;
}

std::vector<RootCause> root_causes(const PropagationResult& result, std::string_view node,
                                   std::string_view perspective) {
  const auto& entry = result.at(node);
  const auto k = result.schema.require_index(perspective);
  std::vector<RootCause> causes;
  for (const auto& cause : entry.causes.at(k)) {
    auto same_leaf = std::find_if(causes.begin(), causes.end(),
                                  [&](const RootCause& c) { return c.leaf == cause.leaf; });
    if (same_leaf == causes.end()) {
      causes.push_back({cause.leaf, cause.path, cause.value});
    } else if (cause.path.size() < same_leaf->path.size()) {
      *same_leaf = {cause.leaf, cause.path, cause.value};
    }
  }
  std::sort(causes.begin(), causes.end(), [](const RootCause& a, const RootCause& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.leaf < b.leaf;
  });
  return causes;
}

std::vector<std::string> root_cause_leaves(const PropagationResult& result, std::string_view node) {
  const auto& entry = result.at(node);
  std::set<std::string> leaves;
  for (const auto& per_perspective : entry.causes) {
    for (const auto& cause : per_perspective) leaves.insert(cause.leaf);
  }
  return {leaves.begin(), leaves.end()};
}

std::vector<RankedNode> top_k(const PropagationResult& result, std::size_t k,
                              std::string_view perspective,
                              std::optional<std::string_view> concept_filter) {
  if (k == 0) throw OutOfRange("top-k needs k >= 1");
  const auto index = result.schema.require_index(perspective);
  std::vector<RankedNode> ranked;
  for (const auto& node : result.nodes) {
    if (concept_filter && !concept_filter->empty() && node.concept_name != *concept_filter) continue;
    ranked.push_back({node.id, node.concept_name, node.risk.total[index]});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedNode& a, const RankedNode& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.id < b.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace riskflow
