#pragma once

#include <cstddef>

#include "riskflow/propagation/propagation.hpp"

namespace riskflow {

inline constexpr std::size_t kOracleMaxNodes = 16;

/// Reference propagation by exhaustive path enumeration. Test support only:
/// exponential in graph size, so graphs above kOracleMaxNodes nodes are
/// rejected with GraphTooLarge.
///
/// Every simple path of shape (abstraction)* (dependency)* that starts at a
/// measured node and never enters a measured node through a dependency edge
/// is scored by measured[k] times the product of importance[k] along it.
/// Directed risk takes the best abstraction-only path and total risk the best
/// path of any shape. Followed risk is one dependency step from a
/// predecessor's total risk, so on a cycle it can include the node's own risk
/// coming back around; total risk is unaffected. `causes[k]` lists every path that
/// attains total[k] (within 1e-12), so it can be compared against the
/// provenance recorded by propagate().
PropagationResult oracle_propagate(const RiskGraph& graph);

}  // namespace riskflow
