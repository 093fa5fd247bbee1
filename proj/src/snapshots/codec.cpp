#include "riskflow/snapshots/codec.hpp"

#include <cstdio>
#include <ctime>

#include "riskflow/assessment/json.hpp"
#include "riskflow/core/errors.hpp"

namespace riskflow {
namespace {

constexpr std::string_view kResultKind = "riskflow-result";
constexpr std::string_view kSnapshotKind = "riskflow-snapshot";

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) throw SchemaError(std::string("expected an object holding '") + key + "'");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

RiskVector vector_field(const Json& obj, const char* key) {
  const auto& list = field(obj, key);
  if (!list.is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
  std::vector<double> values;
  for (const auto& item : list) {
    if (!item.is_number()) throw SchemaError(std::string("field '") + key + "' must hold numbers");
    values.push_back(item.get<double>());
  }
  return RiskVector::unchecked(std::move(values));
}

}  // namespace

std::string format_timestamp(TimePoint tp) {
  using namespace std::chrono;
  const auto ms = time_point_cast<milliseconds>(tp);
  auto secs = time_point_cast<seconds>(ms);
  auto millis = (ms - secs).count();
  if (millis < 0) {
    secs -= seconds(1);
    millis += 1000;
  }
  const std::time_t t = system_clock::to_time_t(secs);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", utc.tm_year + 1900,
                utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec,
                static_cast<int>(millis));
  return buffer;
}

TimePoint parse_timestamp(std::string_view text) {
  // Accepts YYYY-MM-DDTHH:MM:SSZ with optional .mmm before the Z.
  std::tm utc{};
  int millis = 0;
  int consumed = 0;
  const std::string copy(text);
  auto malformed = [&] {
    return SchemaError("malformed timestamp '" + copy + "', expected YYYY-MM-DDTHH:MM:SS[.mmm]Z");
  };
  if (std::sscanf(copy.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &utc.tm_year, &utc.tm_mon, &utc.tm_mday,
                  &utc.tm_hour, &utc.tm_min, &utc.tm_sec, &consumed) != 6 ||
      consumed != 19) {
    throw malformed();
  }
  std::string_view rest = std::string_view(copy).substr(19);
  if (rest.size() == 5 && rest[0] == '.') {
    for (char c : rest.substr(1, 3)) {
      if (c < '0' || c > '9') throw malformed();
      millis = millis * 10 + (c - '0');
    }
    rest.remove_prefix(4);
  }
  // system_clock counts nanoseconds in 64 bits, which runs out in 2262.
  if (rest != "Z" || utc.tm_year < 1970 || utc.tm_year > 2261 || utc.tm_mon < 1 || utc.tm_mon > 12 || utc.tm_mday < 1 || utc.tm_mday > 31 ||
      utc.tm_hour > 23 || utc.tm_min > 59 || utc.tm_sec > 60) {
    throw malformed();
  }
  utc.tm_year -= 1900;
  utc.tm_mon -= 1;
  const std::time_t t = timegm(&utc);
  return std::chrono::system_clock::from_time_t(t) + std::chrono::milliseconds(millis);
}

Json result_to_json(const PropagationResult& result) {
  Json nodes = Json::array();
  for (const auto& n : result.nodes) {
    nodes.push_back(Json{{"id", n.id},
                         {"concept", n.concept_name},
                         {"measured", n.measured},
                         {"dr", n.risk.directed.to_vector()},
                         {"fr", n.risk.followed.to_vector()},
                         {"tr", n.risk.total.to_vector()}});
  }
  const auto& s = result.stats;
  return Json{{"perspectives", result.schema.names()},
              {"nodes", std::move(nodes)},
              {"stats",
               Json{{"abstraction_visits", s.abstraction_visits},
                    {"dependency_visits", s.dependency_visits},
                    {"relaxations", s.relaxations},
                    {"sweeps", s.sweeps},
                    {"truncated_causes", s.truncated_causes}}}};
}

Json provenance_to_json(const PropagationResult& result) {
  Json out = Json::array();
  for (const auto& n : result.nodes) {
    for (std::size_t k = 0; k < n.causes.size(); ++k) {
      if (n.causes[k].empty()) continue;
      Json causes = Json::array();
      for (const auto& c : n.causes[k]) {
        Json path = Json::array();
        for (const auto& e : c.path) path.push_back(edge_ref_to_json(e));
        causes.push_back(Json{{"leaf", c.leaf}, {"path", std::move(path)}, {"value", c.value}});
      }
      out.push_back(Json{
          {"node", n.id}, {"perspective", result.schema.name(k)}, {"causes", std::move(causes)}});
    }
  }
  return out;
}

PropagationResult result_from_json(const Json& result, const Json& provenance) {
  const auto& names_json = field(result, "perspectives");
  if (!names_json.is_array()) throw SchemaError("'perspectives' must be an array");
  std::vector<std::string> names;
  for (const auto& name : names_json) {
    if (!name.is_string()) throw SchemaError("perspective names must be strings");
    names.push_back(name.get<std::string>());
  }
  PropagationResult out{PerspectiveSchema(std::move(names)), {}, {}};
  const std::size_t d = out.schema.dimension();

  const auto& nodes = field(result, "nodes");
  if (!nodes.is_array()) throw SchemaError("'nodes' must be an array");
  for (const auto& item : nodes) {
    NodeResult node;
    const auto& id = field(item, "id");
    const auto& concept_value = field(item, "concept");
    if (!id.is_string() || !concept_value.is_string()) {
      throw SchemaError("node 'id' and 'concept' must be strings");
    }
    node.id = id.get<std::string>();
    node.concept_name = concept_value.get<std::string>();
    node.measured = field(item, "measured").get<bool>();
    node.risk = {vector_field(item, "dr"), vector_field(item, "fr"), vector_field(item, "tr")};
    for (const auto* v : {&node.risk.directed, &node.risk.followed, &node.risk.total}) {
      if (v->size() != d) throw SchemaError("risk vector of '" + node.id + "' has wrong dimension");
    }
    node.causes.resize(d);
    out.nodes.push_back(std::move(node));
  }

  if (auto it = result.find("stats"); it != result.end() && it->is_object()) {
    auto read = [&](const char* key) -> std::size_t {
      auto f = it->find(key);
      return f != it->end() && f->is_number_unsigned() ? f->get<std::size_t>() : 0;
    };
    out.stats = {read("abstraction_visits"), read("dependency_visits"), read("relaxations"),
                 read("sweeps"), read("truncated_causes")};
  }

  if (!provenance.is_null()) {
    if (!provenance.is_array()) throw SchemaError("'provenance' must be an array");
    for (const auto& item : provenance) {
      const auto& node_id = field(item, "node").get_ref<const std::string&>();
      auto* node = const_cast<NodeResult*>(out.find(node_id));
      if (!node) throw SchemaError("provenance refers to unknown node '" + node_id + "'");
      const auto k = out.schema.require_index(field(item, "perspective").get<std::string>());
      for (const auto& cause : field(item, "causes")) {
        ProvenanceEntry entry;
        entry.leaf = field(cause, "leaf").get<std::string>();
        for (const auto& edge : field(cause, "path")) entry.path.push_back(edge_ref_from_json(edge));
        entry.value = field(cause, "value").get<double>();
        node->causes[k].push_back(std::move(entry));
      }
    }
  }
  return out;
}

Json result_document(const PropagationResult& result) {
  return Json{{"kind", kResultKind},
              {"result", result_to_json(result)},
              {"provenance", provenance_to_json(result)}};
}

Json snapshot_to_json(const Snapshot& snapshot) {
  return Json{{"kind", kSnapshotKind},
              {"snapshot_id", snapshot.id},
              {"created_at", format_timestamp(snapshot.created_at)},
              {"label", snapshot.label},
              {"model", model_to_json(snapshot.model)},
              {"result", result_to_json(snapshot.result)},
              {"provenance", provenance_to_json(snapshot.result)}};
}

Snapshot snapshot_from_json(const Json& document) try {
  if (field(document, "kind") != kSnapshotKind) throw SchemaError("not a snapshot document");
  Snapshot snapshot{field(document, "snapshot_id").get<std::string>(),
                    parse_timestamp(field(document, "created_at").get<std::string>()),
                    field(document, "label").get<std::string>(),
                    parse_model_json(field(document, "model")).graph,
                    result_from_json(field(document, "result"), field(document, "provenance"))};
  return snapshot;
} catch (const nlohmann::json::exception& e) {
  throw SchemaError(std::string("malformed snapshot document: ") + e.what());
}

PropagationResult parse_result_document(std::string_view text) try {
  const auto document = parse_json_text(text);
  const auto& kind = field(document, "kind");
  if (kind != kResultKind && kind != kSnapshotKind) {
    throw SchemaError("expected a result or snapshot document");
  }
  auto provenance = document.find("provenance");
  return result_from_json(field(document, "result"),
                          provenance == document.end() ? Json() : *provenance);
} catch (const nlohmann::json::exception& e) {
  throw SchemaError(std::string("malformed result document: ") + e.what());
}

}  // namespace riskflow
