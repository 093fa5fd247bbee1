#include <doctest.h>

#include <algorithm>

#include "riskflow/assessment/assessment.hpp"
#include "riskflow/assessment/json.hpp"
#include "riskflow/assessment/mitigation.hpp"
#include "riskflow/core/errors.hpp"
#include "riskflow/ingest/model_io.hpp"
#include "support/builders.hpp"

using namespace riskflow;
using riskflow::testing::GraphBuilder;
using riskflow::testing::read_fixture;

namespace {

RiskGraph demo() { return parse_model(read_fixture("vehicle_assembly.json")); }

const PropagationResult& demo_result() {
  static const auto result = propagate(demo());
  return result;
}

std::vector<std::string> alert_nodes(const std::vector<Alert>& alerts) {
  std::vector<std::string> out;
  for (const auto& a : alerts) out.push_back(a.node);
  return out;
}

}  // namespace

TEST_CASE("assess: availability threshold on the demo") {
  const auto alerts = assess(demo_result(), {{"availability", 0.7}});
  CHECK(alert_nodes(alerts) == std::vector<std::string>{"DashboardInstallation", "DoorDisassembly",
                                                        "asset-210", "imp-C", "imp-G", "imp-H"});
  for (const auto& a : alerts) {
    CHECK(a.perspective == "availability");
    CHECK(a.margin >= 0.0);
    CHECK(a.margin == doctest::Approx(a.value - a.threshold));
  }
  CHECK(alerts.front().value == doctest::Approx(0.95));
  CHECK(alerts.back().margin == doctest::Approx(0.0));
}

TEST_CASE("assess: boundaries") {
  const auto& result = demo_result();
  CHECK(assess(result, {{"confidentiality", 1.1}, {"integrity", 1.1}, {"safety", 1.1}, {"availability", 1.1}})
            .empty());
  // Zero thresholds alert exactly on the non-zero components.
  const auto all = assess(result, {{"confidentiality", 0.0}, {"integrity", 0.0}, {"safety", 0.0}, {"availability", 0.0}});
  std::size_t nonzero = 0;
  for (const auto& n : result.nodes) {
    for (double x : n.risk.total.values()) nonzero += x > 0.0;
  }
  CHECK(all.size() == nonzero);
  for (const auto& a : all) CHECK(a.value > 0.0);
  CHECK(assess(result, {}).empty());
  CHECK_THROWS_AS(assess(result, {{"privacy", 0.5}}), UnknownPerspective);
  CHECK_THROWS_AS(assess(result, {{"safety", -0.1}}), OutOfRange);
}

TEST_CASE("assess: ties on margin order by node id then perspective") {
  const RiskGraph g = GraphBuilder({"a", "b"}).node("z", {{0.5, 0.5}}).node("y", {{0.5, 0.5}});
  const auto alerts = assess(propagate(g), {{"a", 0.5}, {"b", 0.5}});
  REQUIRE(alerts.size() == 4);
  CHECK(alerts[0].node == "y");
  CHECK(alerts[0].perspective == "a");
  CHECK(alerts[1].node == "y");
  CHECK(alerts[1].perspective == "b");
  CHECK(alerts[2].node == "z");
}

TEST_CASE("root causes of DoorDisassembly are three impacts") {
  const auto& result = demo_result();
  CHECK(root_cause_leaves(result, "DoorDisassembly") == std::vector<std::string>{"imp-A", "imp-C", "imp-D"});
  const auto safety = root_causes(result, "DoorDisassembly", "safety");
  REQUIRE(safety.size() == 1);
  CHECK(safety[0].leaf == "imp-C");
  CHECK(safety[0].value == doctest::Approx(0.8));
  CHECK(safety[0].path == std::vector<EdgeRef>{{"imp-C", "asset-210", "CorrelatedTo"},
                                               {"asset-210", "DoorDisassembly", "CorrelatedTo"}});
  CHECK(root_cause_leaves(result, "DashboardInstallation") ==
        std::vector<std::string>{"imp-A", "imp-C", "imp-D"});
}

TEST_CASE("root causes: zero risk, measured leaf, errors") {
  const auto& result = demo_result();
  CHECK(root_causes(result, "VehicleAssembly", "availability").empty());
  const auto own = root_causes(result, "imp-B", "availability");
  REQUIRE(own.size() == 1);
  CHECK(own[0].leaf == "imp-B");
  CHECK(own[0].path.empty());
  CHECK(own[0].value == doctest::Approx(0.6));
  CHECK_THROWS_AS(root_causes(result, "nope", "availability"), UnknownReference);
  CHECK_THROWS_AS(root_causes(result, "imp-B", "nope"), UnknownPerspective);
}

TEST_CASE("root causes deduplicate by leaf and sort by value") {
  // Two routes from one leaf tie; another leaf ties too.
  const RiskGraph g = GraphBuilder({"a"}).node("l", {{0.5}}).node("m", {{0.5}}).node("x").node("y").node("t")
                          .abs("l", "x").abs("l", "y").abs("x", "t").abs("y", "t").abs("m", "t");
  const auto causes = root_causes(propagate(g), "t", "a");
  REQUIRE(causes.size() == 2);
  CHECK(causes[0].leaf == "l");
  CHECK(causes[1].leaf == "m");
  CHECK(causes[1].path.size() == 1);
}

TEST_CASE("top_k") {
  const auto& result = demo_result();
  const auto best = top_k(result, 1, "availability", std::string_view("ProcessElement"));
  REQUIRE(best.size() == 1);
  CHECK(best[0].id == "DashboardInstallation");  // ties with DoorDisassembly at 0.95, id order
  CHECK(best[0].value == doctest::Approx(0.95));

  const auto processes = top_k(result, 10, "availability", std::string_view("ProcessElement"));
  CHECK(processes.size() == 3);
  for (const auto& r : processes) CHECK(r.concept_name == "ProcessElement");

  const auto everything = top_k(result, 100, "availability");
  CHECK(everything.size() == result.nodes.size());
  CHECK(std::is_sorted(everything.begin(), everything.end(),
                       [](const auto& a, const auto& b) { return a.value > b.value; }));
  CHECK_THROWS_AS(top_k(result, 0, "availability"), OutOfRange);
  CHECK_THROWS_AS(top_k(result, 1, "nope"), UnknownPerspective);
}

TEST_CASE("apply_mitigation") {
  const auto g = demo();
  const auto copy = g;

  SUBCASE("zeroing every leaf zeroes all risk") {
    std::vector<MitigationAction> actions;
    for (const auto& id : classify_leaves(g).ids) actions.push_back(ZeroMeasuredRisk{id});
    for (const auto& n : propagate(apply_mitigation(g, actions).graph).nodes) CHECK(n.risk.total.is_zero());
  }
  SUBCASE("blocking the only edge into a node") {
    const std::vector<MitigationAction> actions{
        SetImportance{{"DoorDisassembly", "DashboardInstallation", "FollowedBy"}, ImportanceVector::zeros(4)}};
    CHECK(propagate(apply_mitigation(g, actions).graph).at("DashboardInstallation").risk.total.is_zero());
  }
  SUBCASE("removing asset-210 cascades and removes the causes") {
    const std::vector<MitigationAction> actions{RemoveNode{"asset-210"}};
    const auto outcome = apply_mitigation(g, actions);
    CHECK(outcome.cascaded_edges.size() == 11);
    CHECK_FALSE(outcome.graph.find_node("asset-210"));
    const auto after = propagate(outcome.graph);
    CHECK(root_cause_leaves(after, "DoorDisassembly").empty());
    CHECK(after.at("DoorDisassembly").risk.total.is_zero());
  }
  SUBCASE("zeroing an unmeasured node is a no-op") {
    const std::vector<MitigationAction> actions{ZeroMeasuredRisk{"asset-211"}};
    CHECK(apply_mitigation(g, actions).graph == g);
  }
  SUBCASE("errors") {
    const std::vector<MitigationAction> unknown{ZeroMeasuredRisk{"ghost"}};
    CHECK_THROWS_AS(apply_mitigation(g, unknown), UnknownReference);
    const std::vector<MitigationAction> edge{RemoveEdge{{"a", "b", "L"}}};
    CHECK_THROWS_AS(apply_mitigation(g, edge), UnknownReference);
    const std::vector<MitigationAction> short_vector{SetMeasuredRisk{"imp-A", RiskVector({0.1})}};
    CHECK_THROWS_AS(apply_mitigation(g, short_vector), DimensionMismatch);
  }
  SUBCASE("edits that break validation are refused") {
    const RiskGraph tiny = GraphBuilder({"a"}).node("l", {{0.5}}).node("x").abs("l", "x");
    RiskGraph broken = tiny;
    broken.concept_map.clear();
    const std::vector<MitigationAction> actions{ZeroMeasuredRisk{"l"}};
    CHECK_THROWS_AS(apply_mitigation(broken, actions), ActionWouldInvalidate);
  }
  CHECK(g == copy);
}

TEST_CASE("pure mitigation classification") {
  const auto g = demo();
  CHECK(is_pure_mitigation(g, ZeroMeasuredRisk{"imp-A"}));
  CHECK(is_pure_mitigation(g, RemoveNode{"imp-A"}));
  CHECK(is_pure_mitigation(g, SetMeasuredRisk{"imp-A", RiskVector({0.3, 0.5, 0.5, 0.0})}));
  CHECK_FALSE(is_pure_mitigation(g, SetMeasuredRisk{"imp-A", RiskVector({0.3, 0.95, 0.5, 0.4})}));
  CHECK_FALSE(is_pure_mitigation(g, SetMeasuredRisk{"asset-211", RiskVector({0, 0, 0, 0})}));
  CHECK(is_pure_mitigation(g, SetImportance{{"asset-210", "DoorDisassembly", "CorrelatedTo"},
                                            ImportanceVector({1, 1, 0.5, 1})}));
}

TEST_CASE("action mini-syntax") {
  CHECK(parse_action("zero:imp-C") == MitigationAction{ZeroMeasuredRisk{"imp-C"}});
  CHECK(parse_action("risk:imp-C=0,0.1,0.5,1") ==
        MitigationAction{SetMeasuredRisk{"imp-C", RiskVector({0, 0.1, 0.5, 1})}});
  CHECK(parse_action("importance:a->b#FollowedBy=1,0") ==
        MitigationAction{SetImportance{{"a", "b", "FollowedBy"}, ImportanceVector({1, 0})}});
  CHECK(parse_action("remove-node:x") == MitigationAction{RemoveNode{"x"}});
  CHECK(parse_action("remove-edge:a->b#L") == MitigationAction{RemoveEdge{{"a", "b", "L"}}});
  CHECK_THROWS_AS(parse_action("zap:x"), Error);
  CHECK_THROWS_AS(parse_action("zero:"), Error);
  CHECK_THROWS_AS(parse_action("risk:x=0.1,abc"), Error);
  CHECK_THROWS_AS(parse_action("risk:x=0.1,1.5"), OutOfRange);
  CHECK_THROWS_AS(parse_action("importance:a->b=1"), Error);

  for (const auto* text : {"zero:imp-C", "risk:n=0.25,0.5", "importance:a->b#L=0.125,1",
                           "remove-node:q", "remove-edge:a->b#L"}) {
    const auto action = parse_action(text);
    CHECK(format_action(action) == text);
    CHECK(action_from_json(action_to_json(action)) == action);
    CHECK(action_from_json(Json(text)) == action);
  }
  CHECK(actions_from_json(Json::parse(R"({"actions": ["zero:a", {"kind": "remove-node", "node": "b"}]})"))
            .size() == 2);
  CHECK_THROWS_AS(actions_from_json(Json::parse(R"({"actions": [{"kind": "teleport"}]})")), SchemaError);
}

TEST_CASE("diff_results") {
  const auto& before = demo_result();
  const auto same = diff_results(before, before);
  for (const auto& n : same.nodes) {
    for (double x : n.delta) CHECK(x == 0.0);
  }
  CHECK(same.max_increase() == 0.0);

  const std::vector<MitigationAction> actions{ZeroMeasuredRisk{"imp-C"}, RemoveNode{"imp-J"}};
  const auto after = propagate(apply_mitigation(demo(), actions).graph);
  const auto delta = diff_results(before, after);
  REQUIRE(delta.before_only.size() == 1);
  CHECK(delta.before_only[0].first == "imp-J");
  CHECK(delta.before_only[0].second == RiskVector({0.6, 0.3, 0.0, 0.1}));
  CHECK(delta.after_only.empty());
  const auto door = std::find_if(delta.nodes.begin(), delta.nodes.end(),
                                 [](const NodeDelta& n) { return n.id == "DoorDisassembly"; });
  REQUIRE(door != delta.nodes.end());
  CHECK(door->delta[2] == doctest::Approx(-0.2));
  CHECK(door->delta[3] == doctest::Approx(-0.05));
  CHECK(door->delta[0] == 0.0);
  CHECK(delta.max_abs_delta[3] == doctest::Approx(0.95));
  CHECK(delta.max_increase() <= 0.0);

  const RiskGraph other = GraphBuilder({"a"}).node("x", {{0.1}});
  CHECK_THROWS_AS(diff_results(before, propagate(other)), SchemaMismatch);
}

TEST_CASE("json payloads") {
  const auto& result = demo_result();
  const auto alerts = alerts_to_json(assess(result, {{"availability", 0.9}}));
  REQUIRE(alerts.size() == 5);  // imp-G sits exactly on the threshold
  CHECK(alerts[0]["node"] == "DashboardInstallation");
  CHECK(alerts[0]["perspective"] == "availability");

  const auto causes = root_causes_to_json("DoorDisassembly", "safety", root_causes(result, "DoorDisassembly", "safety"));
  CHECK(causes["causes"][0]["leaf"] == "imp-C");
  CHECK(causes["causes"][0]["path"][0]["source"] == "imp-C");

  const auto ranking = ranking_to_json("availability", top_k(result, 2, "availability"));
  CHECK(ranking["ranking"].size() == 2);

  CHECK(edge_ref_from_json(Json("a->b#L")) == EdgeRef{"a", "b", "L"});
  CHECK(edge_ref_from_json(edge_ref_to_json({"a", "b", "L"})) == EdgeRef{"a", "b", "L"});
}
