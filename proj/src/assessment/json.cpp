#include "riskflow/assessment/json.hpp"

#include "riskflow/core/errors.hpp"

namespace riskflow {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Json path_to_json(const std::vector<EdgeRef>& path) {
  Json out = Json::array();
  for (const auto& edge : path) out.push_back(edge_ref_to_json(edge));
  return out;
}

std::string string_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw SchemaError(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<double> number_list(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_array()) {
    throw SchemaError(std::string("field '") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& item : *it) {
    if (!item.is_number()) throw SchemaError(std::string("field '") + key + "' must hold numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

}  // namespace

Json edge_ref_to_json(const EdgeRef& ref) {
  return Json{{"source", ref.source}, {"target", ref.target}, {"label", ref.label}};
}

EdgeRef edge_ref_from_json(const Json& value) {
  if (value.is_string()) return EdgeRef::parse(value.get<std::string>());
  if (!value.is_object()) throw SchemaError("edge reference must be an object or a string");
  return {string_field(value, "source"), string_field(value, "target"), string_field(value, "label")};
}

Json alerts_to_json(const std::vector<Alert>& alerts) {
  Json out = Json::array();
  for (const auto& a : alerts) {
    out.push_back(Json{{"node", a.node},
                       {"perspective", a.perspective},
                       {"value", a.value},
                       {"threshold", a.threshold},
                       {"margin", a.margin}});
  }
  return out;
}

Json root_causes_to_json(std::string_view node, std::string_view perspective,
                         const std::vector<RootCause>& causes) {
  Json list = Json::array();
  for (const auto& c : causes) {
    list.push_back(Json{{"leaf", c.leaf}, {"path", path_to_json(c.path)}, {"value", c.value}});
  }
  return Json{{"node", node}, {"perspective", perspective}, {"causes", std::move(list)}};
}

Json ranking_to_json(std::string_view perspective, const std::vector<RankedNode>& ranking) {
  Json list = Json::array();
  for (const auto& r : ranking) {
    list.push_back(Json{{"node", r.id}, {"concept", r.concept_name}, {"value", r.value}});
  }
  return Json{{"perspective", perspective}, {"ranking", std::move(list)}};
}

Json delta_to_json(const RiskDelta& delta) {
  Json nodes = Json::array();
  for (const auto& n : delta.nodes) {
    nodes.push_back(
        Json{{"id", n.id}, {"before", n.before}, {"after", n.after}, {"delta", n.delta}});
  }
  auto only = [](const auto& list) {
    Json out = Json::array();
    for (const auto& [id, total] : list) out.push_back(Json{{"id", id}, {"tr", total.to_vector()}});
    return out;
  };
  Json summary = Json::object();
  for (std::size_t k = 0; k < delta.schema.dimension(); ++k) {
    summary[delta.schema.name(k)] = delta.max_abs_delta[k];
  }
  return Json{{"perspectives", delta.schema.names()},
              {"nodes", std::move(nodes)},
              {"before_only", only(delta.before_only)},
              {"after_only", only(delta.after_only)},
              {"max_abs_delta", std::move(summary)}};
}

Json action_to_json(const MitigationAction& action) {
  return std::visit(
      Overloaded{
          [](const ZeroMeasuredRisk& a) { return Json{{"kind", "zero"}, {"node", a.node}}; },
          [](const SetMeasuredRisk& a) {
            return Json{{"kind", "risk"}, {"node", a.node}, {"values", a.risk.to_vector()}};
          },
          [](const SetImportance& a) {
            return Json{{"kind", "importance"},
                        {"edge", edge_ref_to_json(a.edge)},
                        {"values", a.importance.to_vector()}};
          },
          [](const RemoveNode& a) { return Json{{"kind", "remove-node"}, {"node", a.node}}; },
          [](const RemoveEdge& a) {
            return Json{{"kind", "remove-edge"}, {"edge", edge_ref_to_json(a.edge)}};
          },
      },
      action);
}

MitigationAction action_from_json(const Json& value) {
  if (value.is_string()) return parse_action(value.get<std::string>());
  if (!value.is_object()) throw SchemaError("action must be an object or a string");
  const auto kind = string_field(value, "kind");
  if (kind == "zero") return ZeroMeasuredRisk{string_field(value, "node")};
  if (kind == "remove-node") return RemoveNode{string_field(value, "node")};
  if (kind == "risk") {
    return SetMeasuredRisk{string_field(value, "node"), RiskVector(number_list(value, "values"))};
  }
  auto edge = value.find("edge");
  if (edge == value.end()) throw SchemaError("action '" + kind + "' needs an 'edge' field");
  if (kind == "remove-edge") return RemoveEdge{edge_ref_from_json(*edge)};
  if (kind == "importance") {
    return SetImportance{edge_ref_from_json(*edge), ImportanceVector(number_list(value, "values"))};
  }
  throw SchemaError("unknown action kind '" + kind + "'");
}

std::vector<MitigationAction> actions_from_json(const Json& value) {
  const Json* list = &value;
  if (value.is_object()) {
    auto it = value.find("actions");
    if (it == value.end()) throw SchemaError("request body needs an 'actions' array");
    list = &*it;
  }
  if (!list->is_array()) throw SchemaError("'actions' must be an array");
  std::vector<MitigationAction> actions;
  for (const auto& item : *list) actions.push_back(action_from_json(item));
  return actions;
}

}  // namespace riskflow
