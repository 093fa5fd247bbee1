#include "riskflow/ingest/model_io.hpp"

#include <algorithm>
#include <set>

#include "riskflow/core/errors.hpp"

namespace riskflow {
namespace {

// Walks a document while tracking the JSON pointer of the current position so
// that schema errors can say where they happened.
class Reader {
 public:
  Reader(const ParseOptions& options, ValidationReport& report)
      : options_(options), report_(report) {}

  [[noreturn]] void fail(const std::string& where, const std::string& message) const {
    throw SchemaError((where.empty() ? std::string("/") : where) + ": " + message);
  }

  const Json& object(const Json& value, const std::string& where) const {
    if (!value.is_object()) fail(where, "expected an object");
    return value;
  }

  const Json& array(const Json& value, const std::string& where) const {
    if (!value.is_array()) fail(where, "expected an array");
    return value;
  }

  std::string string(const Json& value, const std::string& where) const {
    if (!value.is_string()) fail(where, "expected a string");
    return value.get<std::string>();
  }

  std::vector<double> numbers(const Json& value, const std::string& where) const {
    array(value, where);
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
      const auto& item = value[i];
      if (!item.is_number()) fail(where + "/" + std::to_string(i), "expected a number");
      out.push_back(item.get<double>());
    }
    return out;
  }

  const Json& required(const Json& obj, const char* key, const std::string& where) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing required field '") + key + "'");
    return *it;
  }

  void check_fields(const Json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) const {
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      if (!options_.lenient) fail(where, "unknown field '" + key + "'");
      report_.add(Severity::Warning, IssueCode::UnknownField, where + "/" + key,
                  "unknown field '" + key + "' ignored");
    }
  }

 private:
  const ParseOptions& options_;
  ValidationReport& report_;
};

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, column] = line_and_column(text, e.byte);
    std::string message = e.what();
    // Drop nlohmann's "[json.exception.parse_error.101] parse error at ...: " prefix.
    if (auto colon = message.find(": "); colon != std::string::npos) {
      message = message.substr(colon + 2);
    }
    throw SyntaxError(line, column, message);
  }
}

ParsedModel parse_model_json(const Json& document, const ParseOptions& options) {
  ValidationReport report;
  Reader in(options, report);

  in.object(document, "");
  in.check_fields(document, {"schema_version", "perspectives", "relation_kinds", "nodes", "edges"},
                  "");

  auto version = in.string(in.required(document, "schema_version", ""), "/schema_version");
  if (version != kModelSchemaVersion) {
    in.fail("/schema_version", "unsupported schema_version '" + version + "'");
  }

  const auto& perspective_list = in.array(in.required(document, "perspectives", ""), "/perspectives");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < perspective_list.size(); ++i) {
    names.push_back(in.string(perspective_list[i], "/perspectives/" + std::to_string(i)));
  }
  if (names.empty()) in.fail("/perspectives", "at least one perspective is required");
  std::optional<PerspectiveSchema> schema;
  try {
    schema.emplace(std::move(names));
  } catch (const SchemaError& e) {
    in.fail("/perspectives", e.what());
  }
  const std::size_t d = schema->dimension();

  ConceptMap concept_map;
  const auto& kinds = in.object(in.required(document, "relation_kinds", ""), "/relation_kinds");
  for (const auto& [label, kind_value] : kinds.items()) {
    const std::string where = "/relation_kinds/" + label;
    auto kind = relation_kind_from_string(in.string(kind_value, where));
    if (!kind) in.fail(where, "relation kind must be \"abstraction\" or \"dependency\"");
    concept_map.emplace(label, *kind);
  }

  std::vector<ElementAtRisk> nodes;
  const auto& node_list = in.array(in.required(document, "nodes", ""), "/nodes");
  for (std::size_t i = 0; i < node_list.size(); ++i) {
    const std::string where = "/nodes/" + std::to_string(i);
    const auto& item = in.object(node_list[i], where);
    in.check_fields(item, {"id", "concept", "measured_risk"}, where);
    ElementAtRisk node;
    node.id = in.string(in.required(item, "id", where), where + "/id");
    if (node.id.empty()) in.fail(where + "/id", "node id must not be empty");
    node.concept_name = in.string(in.required(item, "concept", where), where + "/concept");
    if (auto it = item.find("measured_risk"); it != item.end() && !it->is_null()) {
      node.measured_risk = RiskVector::unchecked(in.numbers(*it, where + "/measured_risk"));
    }
    nodes.push_back(std::move(node));
  }

  std::vector<RelationEdge> edges;
  const auto& edge_list = in.array(in.required(document, "edges", ""), "/edges");
  for (std::size_t i = 0; i < edge_list.size(); ++i) {
    const std::string where = "/edges/" + std::to_string(i);
    const auto& item = in.object(edge_list[i], where);
    in.check_fields(item, {"source", "target", "label", "importance"}, where);
    RelationEdge edge;
    edge.source = in.string(in.required(item, "source", where), where + "/source");
    edge.target = in.string(in.required(item, "target", where), where + "/target");
    edge.label = in.string(in.required(item, "label", where), where + "/label");
    // Unmapped labels surface as UnmappedLabel from validation.
    auto kind = concept_map.find(edge.label);
    edge.kind = kind == concept_map.end() ? RelationKind::Dependency : kind->second;
    if (auto it = item.find("importance"); it != item.end() && !it->is_null()) {
      edge.importance = ImportanceVector::unchecked(in.numbers(*it, where + "/importance"));
    } else {
      edge.importance = ImportanceVector::ones(d);
    }
    edges.push_back(std::move(edge));
  }

  RiskGraph graph{std::move(*schema), std::move(nodes), std::move(edges), std::move(concept_map)};
  auto validation = validate_graph(graph);
  if (!validation.ok) throw ValidationError(std::move(validation));
  for (auto& issue : validation.issues) report.issues.push_back(std::move(issue));
  return {std::move(graph), std::move(report)};
}

ParsedModel parse_model_document(std::string_view text, const ParseOptions& options) {
  return parse_model_json(parse_json_text(text), options);
}

Json model_to_json(const RiskGraph& graph) {
  Json doc = Json::object();
  doc["schema_version"] = kModelSchemaVersion;
  doc["perspectives"] = graph.schema.names();
  Json kinds = Json::object();
  for (const auto& [label, kind] : graph.concept_map) kinds[label] = to_string(kind);
  doc["relation_kinds"] = std::move(kinds);

  Json nodes = Json::array();
  for (const auto& node : graph.nodes) {
    Json item = Json::object();
    item["id"] = node.id;
    item["concept"] = node.concept_name;
    if (node.measured_risk) item["measured_risk"] = node.measured_risk->to_vector();
    nodes.push_back(std::move(item));
  }
  doc["nodes"] = std::move(nodes);

  Json edges = Json::array();
  for (const auto& edge : graph.edges) {
    edges.push_back(Json{{"source", edge.source},
                         {"target", edge.target},
                         {"label", edge.label},
                         {"importance", edge.importance.to_vector()}});
  }
  doc["edges"] = std::move(edges);
  return doc;
}

std::string serialize_model(const RiskGraph& graph) { return model_to_json(graph).dump(2) + "\n"; }

Json report_to_json(const ValidationReport& report) {
  Json issues = Json::array();
  for (const auto& issue : report.issues) {
    issues.push_back(Json{{"severity", to_string(issue.severity)},
                          {"code", to_string(issue.code)},
                          {"ref", issue.ref},
                          {"message", issue.message}});
  }
  return Json{{"ok", report.ok},
              {"errors", report.error_count()},
              {"warnings", report.warning_count()},
              {"issues", std::move(issues)}};
}

std::vector<ExtractionRecord> extract_records(const RiskGraph& graph) {
  std::vector<ExtractionRecord> records;
  records.reserve(graph.edges.size());
  for (const auto& edge : graph.edges) {
    const auto* source = graph.find_node(edge.source);
    records.push_back({edge.source, edge.target, edge.label,
                       source ? source->measured_risk : std::nullopt, edge.importance});
  }
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source, a.target, a.label) < std::tie(b.source, b.target, b.label);
  });
  return records;
}

}  // namespace riskflow
