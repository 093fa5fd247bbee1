#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "riskflow/core/graph.hpp"
#include "riskflow/core/validation.hpp"

namespace riskflow {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kModelSchemaVersion = "1";

struct ParseOptions {
  /// Downgrade unknown fields from SchemaError to UnknownField warnings.
  bool lenient = false;
};

struct ParsedModel {
  RiskGraph graph;
  /// Validation findings (warnings only, since errors throw) plus lenient-mode
  /// UnknownField warnings.
  ValidationReport report;
};

/// Parses and validates a model document.
///
/// Throws SyntaxError for malformed JSON (line/column), SchemaError for
/// structural problems (positioned by JSON pointer), and ValidationError when
/// the resulting graph fails validate_graph. Omitted importance vectors become
/// all-ones.
ParsedModel parse_model_document(std::string_view text, const ParseOptions& options = {});
ParsedModel parse_model_json(const Json& document, const ParseOptions& options = {});

inline RiskGraph parse_model(std::string_view text, const ParseOptions& options = {}) {
  return parse_model_document(text, options).graph;
}

/// Canonical JSON form: fixed key order, explicit importance on every edge.
Json model_to_json(const RiskGraph& graph);
std::string serialize_model(const RiskGraph& graph);

/// Parses JSON text, translating parser failures into SyntaxError.
Json parse_json_text(std::string_view text);

Json report_to_json(const ValidationReport& report);

/// One row of the extraction output: a relation, the measured risk over its
/// source (if any), and the relation's importance.
struct ExtractionRecord {
  std::string source;
  std::string target;
  std::string label;
  std::optional<RiskVector> source_risk;
  ImportanceVector importance;

  friend bool operator==(const ExtractionRecord&, const ExtractionRecord&) = default;
};

/// One record per edge, ordered by (source, target, label).
std::vector<ExtractionRecord> extract_records(const RiskGraph& graph);

}  // namespace riskflow
