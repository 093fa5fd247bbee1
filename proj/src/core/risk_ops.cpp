#include "riskflow/core/risk_ops.hpp"

#include <algorithm>
#include <string>

namespace riskflow {
namespace {

void require_dimension(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionMismatch(std::string(what) + " has dimension " + std::to_string(got) +
                            ", expected " + std::to_string(want));
  }
}

}  // namespace

RiskVector compose_risk(double probability, std::span<const double> severities,
                        std::size_t dimension) {
  require_dimension(severities.size(), dimension, "severity list");
  if (!RiskVector::component_in_range(probability)) {
    throw OutOfRange("probability " + std::to_string(probability) + " is outside [0, 1]");
  }
  std::vector<double> out(dimension);
  for (std::size_t k = 0; k < dimension; ++k) {
    if (!RiskVector::component_in_range(severities[k])) {
      throw OutOfRange("severity " + std::to_string(k) + " = " +
                       std::to_string(severities[k]) + " is outside [0, 1]");
    }
    out[k] = probability * severities[k];
  }
  return RiskVector(std::move(out));
}

RiskVector max_per_aspect(std::span<const RiskVector> bag, std::size_t dimension) {
  std::vector<double> out(dimension, 0.0);
  for (const auto& v : bag) {
    require_dimension(v.size(), dimension, "bag member");
    for (std::size_t k = 0; k < dimension; ++k) out[k] = std::max(out[k], v[k]);
  }
  return RiskVector::unchecked(std::move(out));
}

RiskVector apply_importance(const RiskVector& risk, const ImportanceVector& importance) {
  require_dimension(importance.size(), risk.size(), "importance vector");
  std::vector<double> out(risk.size());
  for (std::size_t k = 0; k < risk.size(); ++k) out[k] = risk[k] * importance[k];
  return RiskVector::unchecked(std::move(out));
}

std::string_view to_string(RiskFunction fn) noexcept {
  switch (fn) {
    case RiskFunction::MaxPerAspect:
      return "max_per_aspect";
  }
  return "unknown";
}

RiskFunction risk_function_from_name(std::string_view name) {
  if (name == "max_per_aspect") return RiskFunction::MaxPerAspect;
  throw Error("unknown risk function '" + std::string(name) + "'");
}

}  // namespace riskflow
