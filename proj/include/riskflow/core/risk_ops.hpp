#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "riskflow/core/vectors.hpp"

namespace riskflow {

/// Risk of an event as probability times the per-perspective severities.
RiskVector compose_risk(double probability, std::span<const double> severities,
                        std::size_t dimension);

/// Componentwise maximum of a bag of vectors. The empty bag yields zeros(d).
RiskVector max_per_aspect(std::span<const RiskVector> bag, std::size_t dimension);

/// Elementwise product of a risk vector with an edge importance.
RiskVector apply_importance(const RiskVector& risk, const ImportanceVector& importance);

/// Aggregation functions available to the propagation engine. Only the
/// worst-case maximum is built in; the enum is the extension point.
enum class RiskFunction { MaxPerAspect };

std::string_view to_string(RiskFunction fn) noexcept;
/// Throws riskflow::Error for names that are not registered.
RiskFunction risk_function_from_name(std::string_view name);

}  // namespace riskflow
