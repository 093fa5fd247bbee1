#include <doctest.h>

#include <httplib.h>

#include <filesystem>
#include <random>
#include <thread>

#include "riskflow/assessment/json.hpp"
#include "riskflow/snapshots/codec.hpp"
#include "riskflow/service/api_service.hpp"
#include "support/builders.hpp"

using namespace riskflow;
using riskflow::testing::read_fixture;

namespace {

namespace fs = std::filesystem;

// One service per test case, on an ephemeral port.
class Server {
 public:
  Server() {
    std::random_device rd;
    store_ = fs::temp_directory_path() / ("riskflow-svc-" + std::to_string(rd()));
    service_ = std::make_unique<ApiService>(ServiceOptions{store_, "https://analyst.example"});
    port_ = service_->bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { service_->listen_after_bind(); });
    service_->wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  ~Server() {
    client_.reset();
    service_->stop();
    thread_.join();
    fs::remove_all(store_);
  }

  httplib::Client& client() { return *client_; }

  int put_demo(const std::string& id = "demo") {
    auto res = client_->Put("/models/" + id, read_fixture("vehicle_assembly.json"), "application/json");
    REQUIRE(res);
    return res->status;
  }

 private:
  fs::path store_;
  std::unique_ptr<ApiService> service_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

Json body_of(const httplib::Result& res) {
  REQUIRE(res);
  return Json::parse(res->body);
}

const Json* find_node_delta(const Json& delta, const std::string& id) {
  for (const auto& n : delta["nodes"]) {
    if (n["id"] == id) return &n;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("upload and read back a model") {
  Server s;
  auto res = s.client().Put("/models/demo", read_fixture("vehicle_assembly.json"), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const auto put = Json::parse(res->body);
  CHECK(put["version"] == 1);
  CHECK(put["report"]["ok"] == true);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "https://analyst.example");

  const auto graph = body_of(s.client().Get("/models/demo/graph"));
  CHECK(graph["version"] == 1);
  CHECK(parse_model(graph["model"].dump()) == parse_model(read_fixture("vehicle_assembly.json")));

  CHECK(s.put_demo() == 200);
  CHECK(body_of(s.client().Get("/models/demo/graph"))["version"] == 2);
}

TEST_CASE("invalid uploads are rejected with the report") {
  Server s;
  auto res = s.client().Put("/models/bad", R"({"schema_version": "1", "perspectives": ["a"],
    "relation_kinds": {}, "nodes": [{"id": "x", "concept": "C"}],
    "edges": [{"source": "x", "target": "y", "label": "L"}]})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  const auto error = Json::parse(res->body)["error"];
  CHECK(error["code"] == "validation");
  CHECK(error["detail"].dump().find("DanglingEndpoint") != std::string::npos);
  CHECK(s.client().Get("/models/bad/graph")->status == 404);

  auto syntax = s.client().Put("/models/bad", "{", "application/json");
  CHECK(syntax->status == 400);
  CHECK(Json::parse(syntax->body)["error"]["code"] == "syntax");
}

TEST_CASE("propagate, assess and root causes") {
  Server s;
  s.put_demo();
  const auto result = body_of(s.client().Post("/models/demo/propagate"));
  CHECK(result["version"] == 1);
  CHECK(parse_result_document(result.dump()) == propagate(parse_model(read_fixture("vehicle_assembly.json"))));

  const auto alerts = body_of(s.client().Get("/models/demo/assess?threshold.availability=0.7"));
  CHECK(alerts["alerts"].size() == 6);
  CHECK(alerts["alerts"][0]["node"] == "DashboardInstallation");
  CHECK(s.client().Get("/models/demo/assess?threshold.availability=high")->status == 400);
  CHECK(s.client().Get("/models/demo/assess?threshold.nope=0.5")->status == 400);

  const auto causes = body_of(s.client().Get("/models/demo/nodes/DoorDisassembly/root-causes?perspective=safety"));
  CHECK(causes["causes"][0]["leaf"] == "imp-C");
  const auto all = body_of(s.client().Get("/models/demo/nodes/DoorDisassembly/root-causes"));
  CHECK(all["perspectives"].size() == 4);
  CHECK(s.client().Get("/models/demo/nodes/ghost/root-causes")->status == 404);
}

TEST_CASE("what-if is stateless") {
  Server s;
  s.put_demo();
  const auto empty = body_of(s.client().Post("/models/demo/whatif", "[]", "application/json"));
  for (const auto& n : empty["delta"]["nodes"]) {
    for (const auto& x : n["delta"]) CHECK(x.get<double>() == 0.0);
  }
  const auto no_body = body_of(s.client().Post("/models/demo/whatif"));
  CHECK(no_body["delta"] == empty["delta"]);

  const auto zeroed = body_of(s.client().Post("/models/demo/whatif", R"({"actions": ["zero:imp-C"]})",
                                              "application/json"));
  for (const auto* id : {"DoorDisassembly", "DashboardInstallation"}) {
    const auto* n = find_node_delta(zeroed["delta"], id);
    REQUIRE(n);
    CHECK((*n)["delta"][2].get<double>() == doctest::Approx(-0.2));
    CHECK((*n)["delta"][3].get<double>() == doctest::Approx(-0.05));
  }
  CHECK(body_of(s.client().Get("/models/demo/graph"))["version"] == 1);
  const auto again = s.client().Post("/models/demo/whatif", R"({"actions": ["zero:imp-C"]})", "application/json");
  CHECK(Json::parse(again->body) == zeroed);

  auto bad = s.client().Post("/models/demo/whatif", R"(["zero:ghost"])", "application/json");
  CHECK(bad->status == 400);
  CHECK(Json::parse(bad->body)["error"]["code"] == "unknown_reference");
}

TEST_CASE("commit uses optimistic versioning") {
  Server s;
  s.put_demo();
  auto ok = s.client().Post("/models/demo/whatif/commit", R"({"version": 1, "actions": ["zero:imp-C"]})",
                            "application/json");
  REQUIRE(ok);
  CHECK(ok->status == 200);
  const auto committed = Json::parse(ok->body);
  CHECK(committed["version"] == 2);
  CHECK(committed["committed"][0]["node"] == "imp-C");

  auto stale = s.client().Post("/models/demo/whatif/commit", R"({"version": 1, "actions": ["zero:imp-A"]})",
                               "application/json");
  CHECK(stale->status == 409);
  CHECK(Json::parse(stale->body)["error"]["detail"]["version"] == 2);
  const auto graph = body_of(s.client().Get("/models/demo/graph"));
  CHECK(graph["version"] == 2);
  CHECK(graph["committed"].size() == 1);

  // Replaying the committed actions on the uploaded model gives the current one.
  const auto base = parse_model(read_fixture("vehicle_assembly.json"));
  CHECK(parse_model(graph["model"].dump()) == apply_mitigation(base, actions_from_json(graph["committed"])).graph);

  CHECK(s.client().Post("/models/demo/whatif/commit", R"({"actions": []})", "application/json")->status == 400);
  CHECK(s.client().Post("/models/ghost/whatif/commit", R"({"version": 1})", "application/json")->status == 404);
}

TEST_CASE("snapshots over HTTP") {
  Server s;
  s.put_demo();
  CHECK(body_of(s.client().Get("/snapshots"))["snapshots"].empty());
  const auto first = body_of(s.client().Post("/models/demo/propagate?snapshot=true&label=base"));
  const auto a = first["snapshot_id"].get<std::string>();
  const auto second = body_of(s.client().Post("/models/demo/whatif?snapshot=1", R"(["zero:imp-C"])",
                                               "application/json"));
  const auto b = second["snapshot_id"].get<std::string>();
  CHECK(a != b);

  const auto list = body_of(s.client().Get("/snapshots"));
  REQUIRE(list["snapshots"].size() == 2);
  CHECK(list["snapshots"][0]["label"] == "base");
  CHECK(body_of(s.client().Get("/snapshots?from=2200-01-01T00:00:00Z"))["snapshots"].empty());
  CHECK(s.client().Get("/snapshots?from=2999-01-01T00:00:00Z")->status == 400);

  CHECK(body_of(s.client().Get("/snapshots/" + a.substr(0, 8)))["snapshot_id"] == a);
  CHECK(s.client().Get("/snapshots/0000000000")->status == 404);
  const auto diff = body_of(s.client().Get("/snapshots/" + a + "/diff/" + b));
  const auto* door = find_node_delta(diff, "DoorDisassembly");
  REQUIRE(door);
  CHECK((*door)["delta"][2].get<double>() == doctest::Approx(-0.2));
}

TEST_CASE("unknown models and preflight") {
  Server s;
  CHECK(s.client().Get("/models/nope/graph")->status == 404);
  CHECK(s.client().Post("/models/nope/propagate")->status == 404);
  auto error = Json::parse(s.client().Get("/models/nope/graph")->body);
  CHECK(error["error"]["code"] == "not_found");
  auto preflight = s.client().Options("/models/demo/whatif");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);
  CHECK(preflight->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
}
