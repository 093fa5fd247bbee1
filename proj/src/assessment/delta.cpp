#include <algorithm>
#include <cmath>

#include "riskflow/assessment/assessment.hpp"
#include "riskflow/core/errors.hpp"

namespace riskflow {

double RiskDelta::max_increase() const noexcept {
  double worst = 0.0;
  for (const auto& node : nodes) {
    for (double x : node.delta) worst = std::max(worst, x);
  }
  return worst;
}

RiskDelta diff_results(const PropagationResult& before, const PropagationResult& after) {
  if (!(before.schema == after.schema)) {
    throw SchemaMismatch("cannot compare results with different perspective lists");
  }
  const std::size_t d = before.schema.dimension();
  RiskDelta delta{before.schema, {}, {}, {}, std::vector<double>(d, 0.0)};

  for (const auto& b : before.nodes) {
    const auto* a = after.find(b.id);
    if (!a) {
      delta.before_only.emplace_back(b.id, b.risk.total);
      continue;
    }
    NodeDelta entry{b.id, b.risk.total.to_vector(), a->risk.total.to_vector(),
                    std::vector<double>(d, 0.0)};
    for (std::size_t k = 0; k < d; ++k) {
      entry.delta[k] = entry.after[k] - entry.before[k];
      delta.max_abs_delta[k] = std::max(delta.max_abs_delta[k], std::abs(entry.delta[k]));
    }
    delta.nodes.push_back(std::move(entry));
  }
  for (const auto& a : after.nodes) {
    if (!before.find(a.id)) delta.after_only.emplace_back(a.id, a.risk.total);
  }
  return delta;
}

}  // namespace riskflow
