#include "riskflow/core/errors.hpp"

#include "riskflow/core/validation.hpp"

namespace riskflow {

std::string_view error_code(const std::exception& error) noexcept {
  // Most-derived first; ValidationError and SyntaxError both derive from Error.
  if (dynamic_cast<const ValidationError*>(&error)) return "validation";
  if (dynamic_cast<const SyntaxError*>(&error)) return "syntax";
  if (dynamic_cast<const SchemaError*>(&error)) return "schema";
  if (dynamic_cast<const SchemaMismatch*>(&error)) return "schema_mismatch";
  if (dynamic_cast<const DimensionMismatch*>(&error)) return "dimension_mismatch";
  if (dynamic_cast<const OutOfRange*>(&error)) return "out_of_range";
  if (dynamic_cast<const UnknownPerspective*>(&error)) return "unknown_perspective";
  if (dynamic_cast<const UnknownReference*>(&error)) return "unknown_reference";
  if (dynamic_cast<const IterationLimitExceeded*>(&error)) return "iteration_limit";
  if (dynamic_cast<const GraphTooLarge*>(&error)) return "graph_too_large";
  if (dynamic_cast<const NotFound*>(&error)) return "not_found";
  if (dynamic_cast<const StorageError*>(&error)) return "storage";
  if (dynamic_cast<const ActionWouldInvalidate*>(&error)) return "action_would_invalidate";
  if (dynamic_cast<const Error*>(&error)) return "invalid_argument";
  return "internal";
}

}  // namespace riskflow
