#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskflow/core/errors.hpp"
#include "riskflow/core/graph.hpp"

namespace riskflow {

enum class Severity { Warning, Error };

enum class IssueCode {
  DuplicateId,
  DuplicateEdge,
  DanglingEndpoint,
  SelfAbstraction,
  AbstractionCycle,
  DimensionMismatch,
  ValueOutOfRange,
  UnmappedLabel,
  KindMismatch,
  DependencySelfLoop,
  UnreachableNode,
  UnknownField,
};

std::string_view to_string(Severity severity) noexcept;
std::string_view to_string(IssueCode code) noexcept;

struct ValidationIssue {
  Severity severity = Severity::Error;
  IssueCode code = IssueCode::DuplicateId;
  std::string ref;  // node id or edge ref
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;

  std::size_t error_count() const noexcept;
  std::size_t warning_count() const noexcept;
  bool has(IssueCode code) const noexcept;
  void add(Severity severity, IssueCode code, std::string ref, std::string message);
};

/// Structural checks. Never throws; every finding goes into the report.
ValidationReport validate_graph(const RiskGraph& graph);

/// Topological order (node indices) of the subgraph induced by abstraction
/// edges, or nullopt when it contains a cycle. Edges with unknown endpoints
/// are ignored. Ties are broken by node index, so the order is deterministic.
std::optional<std::vector<std::size_t>> abstraction_topological_order(const RiskGraph& graph);

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Throws ValidationError when the report carries errors.
void require_valid(const RiskGraph& graph);

}  // namespace riskflow
