#pragma once

#include <string_view>
#include <vector>

#include "riskflow/assessment/assessment.hpp"
#include "riskflow/assessment/mitigation.hpp"
#include "riskflow/ingest/model_io.hpp"

namespace riskflow {

Json edge_ref_to_json(const EdgeRef& ref);
/// Accepts {"source","target","label"} or the "src->dst#label" string form.
EdgeRef edge_ref_from_json(const Json& value);

Json alerts_to_json(const std::vector<Alert>& alerts);
Json root_causes_to_json(std::string_view node, std::string_view perspective,
                         const std::vector<RootCause>& causes);
Json ranking_to_json(std::string_view perspective, const std::vector<RankedNode>& ranking);
Json delta_to_json(const RiskDelta& delta);

Json action_to_json(const MitigationAction& action);
/// Accepts the object form ({"kind": "zero", "node": ...}) or a string in the
/// shell syntax understood by parse_action. Throws SchemaError on bad shapes.
MitigationAction action_from_json(const Json& value);
std::vector<MitigationAction> actions_from_json(const Json& value);

}  // namespace riskflow
