#include "riskflow/assessment/mitigation.hpp"

#include <algorithm>
#include <charconv>

#include "riskflow/core/errors.hpp"
#include "riskflow/core/validation.hpp"

namespace riskflow {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ElementAtRisk& require_node(RiskGraph& graph, const std::string& id) {
  if (auto* node = graph.find_node(id)) return *node;
  throw UnknownReference("unknown node '" + id + "'");
}

RelationEdge& require_edge(RiskGraph& graph, const EdgeRef& ref) {
  if (auto* edge = graph.find_edge(ref)) return *edge;
  throw UnknownReference("unknown edge '" + ref.to_string() + "'");
}

template <typename Tag>
void require_dimension(const UnitVector<Tag>& v, std::size_t d, const std::string& what) {
  if (v.size() != d) {
    throw DimensionMismatch(what + " has " + std::to_string(v.size()) + " components, schema has " +
                            std::to_string(d));
  }
}

std::vector<double> parse_values(std::string_view text, std::string_view spec) {
  std::vector<double> values;
  while (true) {
    auto comma = text.find(',');
    auto token = text.substr(0, comma);
    double value = 0.0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || end != token.data() + token.size()) {
      throw Error("malformed number '" + std::string(token) + "' in action '" + std::string(spec) +
                  "'");
    }
    values.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

std::string format_values(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, values[i]);
    out.append(buffer, end);
  }
  return out;
}

}  // namespace

MitigationOutcome apply_mitigation(const RiskGraph& graph,
                                   std::span<const MitigationAction> actions) {
  MitigationOutcome outcome{graph, {}};
  RiskGraph& g = outcome.graph;
  const std::size_t d = g.dimension();

  for (const auto& action : actions) {
    std::visit(
        Overloaded{
            [&](const ZeroMeasuredRisk& a) {
              auto& node = require_node(g, a.node);
              if (node.measured_risk) node.measured_risk = RiskVector::zeros(d);
            },
            [&](const SetMeasuredRisk& a) {
              auto& node = require_node(g, a.node);
              require_dimension(a.risk, d, "risk for '" + a.node + "'");
              node.measured_risk = a.risk;
            },
            [&](const SetImportance& a) {
              auto& edge = require_edge(g, a.edge);
              require_dimension(a.importance, d, "importance for '" + a.edge.to_string() + "'");
              edge.importance = a.importance;
            },
            [&](const RemoveNode& a) {
              require_node(g, a.node);
              std::erase_if(g.nodes, [&](const ElementAtRisk& n) { return n.id == a.node; });
              std::erase_if(g.edges, [&](const RelationEdge& e) {
                if (e.source != a.node && e.target != a.node) return false;
                outcome.cascaded_edges.push_back(e.ref());
                return true;
              });
            },
            [&](const RemoveEdge& a) {
              require_edge(g, a.edge);
              std::erase_if(g.edges, [&](const RelationEdge& e) { return e.ref() == a.edge; });
            },
        },
        action);
  }

  auto report = validate_graph(g);
  if (!report.ok) {
    throw ActionWouldInvalidate(ValidationError(std::move(report)).what());
  }
  return outcome;
}

bool is_pure_mitigation(const RiskGraph& graph, const MitigationAction& action) {
  return std::visit(
      Overloaded{
          [](const ZeroMeasuredRisk&) { return true; },
          [&](const SetMeasuredRisk& a) {
            const auto* node = graph.find_node(a.node);
            if (!node || !node->measured_risk || node->measured_risk->size() != a.risk.size()) {
              return false;
            }
            for (std::size_t k = 0; k < a.risk.size(); ++k) {
              if (a.risk[k] > (*node->measured_risk)[k]) return false;
            }
            return true;
          },
          [&](const SetImportance& a) {
            const auto* edge = graph.find_edge(a.edge);
            if (!edge || edge->importance.size() != a.importance.size()) return false;
            for (std::size_t k = 0; k < a.importance.size(); ++k) {
              if (a.importance[k] > edge->importance[k]) return false;
            }
            return true;
          },
          [](const RemoveNode&) { return true; },
          [](const RemoveEdge&) { return true; },
      },
      action);
}

MitigationAction parse_action(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error("malformed action '" + std::string(spec) + "', expected <kind>:<target>");
  }
  const auto kind = spec.substr(0, colon);
  const auto body = spec.substr(colon + 1);
  auto split_values = [&](std::string_view text) {
    const auto eq = text.rfind('=');
    if (eq == std::string_view::npos) {
      throw Error("action '" + std::string(spec) + "' needs '=' followed by values");
    }
    return std::pair{text.substr(0, eq), parse_values(text.substr(eq + 1), spec)};
  };
  auto require_target = [&](std::string_view target) {
    if (target.empty()) throw Error("action '" + std::string(spec) + "' has an empty target");
    return std::string(target);
  };

  if (kind == "zero") return ZeroMeasuredRisk{require_target(body)};
  if (kind == "remove-node") return RemoveNode{require_target(body)};
  if (kind == "remove-edge") return RemoveEdge{EdgeRef::parse(body)};
  if (kind == "risk") {
    auto [target, values] = split_values(body);
    return SetMeasuredRisk{require_target(target), RiskVector(std::move(values))};
  }
  if (kind == "importance") {
    auto [target, values] = split_values(body);
    return SetImportance{EdgeRef::parse(target), ImportanceVector(std::move(values))};
  }
  throw Error("unknown action kind '" + std::string(kind) + "'");
}

std::string format_action(const MitigationAction& action) {
  return std::visit(
      Overloaded{
          [](const ZeroMeasuredRisk& a) { return "zero:" + a.node; },
          [](const SetMeasuredRisk& a) { return "risk:" + a.node + "=" + format_values(a.risk.values()); },
          [](const SetImportance& a) {
            return "importance:" + a.edge.to_string() + "=" + format_values(a.importance.values());
          },
          [](const RemoveNode& a) { return "remove-node:" + a.node; },
          [](const RemoveEdge& a) { return "remove-edge:" + a.edge.to_string(); },
      },
      action);
}

}  // namespace riskflow
