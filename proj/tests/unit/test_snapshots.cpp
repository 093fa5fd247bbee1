#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "riskflow/core/errors.hpp"
#include "riskflow/snapshots/store.hpp"
#include "support/builders.hpp"

using namespace riskflow;
using namespace std::chrono_literals;
using riskflow::testing::read_fixture;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("riskflow-snap-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RiskGraph demo() { return parse_model(read_fixture("vehicle_assembly.json")); }

// A clock that ticks one second per call from a fixed origin.
SnapshotStore::Clock ticking(TimePoint start) {
  auto now = std::make_shared<TimePoint>(start);
  return [now] {
    auto t = *now;
    *now += 1s;
    return t;
  };
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

}  // namespace

TEST_CASE("timestamps") {
  const auto t = parse_timestamp("2024-03-01T12:34:56Z");
  CHECK(format_timestamp(t) == "2024-03-01T12:34:56.000Z");
  CHECK(parse_timestamp("2024-03-01T12:34:56.250Z") - t == std::chrono::milliseconds(250));
  CHECK(parse_timestamp(format_timestamp(t)) == t);
  CHECK_THROWS_AS(parse_timestamp("yesterday"), Error);
  CHECK_THROWS_AS(parse_timestamp("2024-13-01T00:00:00Z"), Error);
  CHECK_THROWS_AS(parse_timestamp("2024-03-01T12:34:56.25Z"), Error);
  CHECK_THROWS_AS(parse_timestamp("2024-03-01T12:34:56"), Error);
  CHECK_THROWS_AS(parse_timestamp("2999-01-01T00:00:00Z"), Error);  // beyond the clock's range
}

TEST_CASE("save is idempotent and content addressed") {
  TempDir dir;
  SnapshotStore store(dir.path);
  const auto g = demo();
  const auto result = propagate(g);
  const auto id = store.save(g, result, "first");
  CHECK(id.size() == 64);
  CHECK(store.save(g, result, "again") == id);
  CHECK(line_count(dir.path / "index.ndjson") == 1);
  CHECK(id == snapshot_id(g, result));

  auto changed = g;
  changed.find_node("imp-A")->measured_risk = RiskVector({0.1, 0.1, 0.1, 0.1});
  const auto other = store.save(changed, propagate(changed));
  CHECK(other != id);
  CHECK(store.list().size() == 2);
}

TEST_CASE("load returns the saved content bit for bit") {
  TempDir dir;
  SnapshotStore store(dir.path);
  RiskGraph g = demo();
  // Awkward doubles survive the JSON round trip.
  g.find_node("imp-B")->measured_risk = RiskVector({0.1, 1.0 / 3.0, 2.0 / 7.0, 1e-17});
  const auto result = propagate(g);
  const auto id = store.save(g, result, "odd values");
  const auto snap = store.load(id);
  CHECK(snap.id == id);
  CHECK(snap.label == "odd values");
  CHECK(snap.model == g);
  CHECK(snap.result == result);
  CHECK(snapshot_id(snap.model, snap.result) == id);
}

TEST_CASE("list filters and orders by time") {
  TempDir dir;
  const auto origin = parse_timestamp("2024-01-01T00:00:00Z");
  SnapshotStore store(dir.path, ticking(origin));
  CHECK(store.list().empty());

  auto g = demo();
  std::vector<std::string> ids;
  for (double x : {0.1, 0.2, 0.3}) {
    g.find_node("imp-A")->measured_risk = RiskVector({x, x, x, x});
    ids.push_back(store.save(g, propagate(g), "run"));
  }
  const auto all = store.list();
  REQUIRE(all.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(all[i].id == ids[i]);
    CHECK(all[i].created_at == origin + std::chrono::seconds(i));
  }
  CHECK(store.list(origin + 1s).size() == 2);
  CHECK(store.list(std::nullopt, origin + 1s).size() == 2);
  CHECK(store.list(origin + 1s, origin + 1s).size() == 1);
  CHECK(store.list(origin + 1h).empty());

  // A second store on the same directory sees the same index.
  CHECK(SnapshotStore(dir.path).list() == all);
}

TEST_CASE("prefix resolution and lookup errors") {
  TempDir dir;
  SnapshotStore store(dir.path);
  const auto g = demo();
  const auto id = store.save(g, propagate(g));
  CHECK(store.resolve(id.substr(0, 8)) == id);
  CHECK(store.load(id.substr(0, 12)).id == id);
  CHECK_THROWS_AS(store.resolve(id.substr(0, 3)), NotFound);
  CHECK_THROWS_AS(store.load("ffffffffffff"), NotFound);
  CHECK_THROWS_AS(store.load(std::string(64, '0')), NotFound);
}

TEST_CASE("corrupt files surface as storage errors") {
  TempDir dir;
  SnapshotStore store(dir.path);
  const auto g = demo();
  const auto id = store.save(g, propagate(g));
  std::ofstream(dir.path / "snapshots" / (id + ".json")) << "{ not json";
  CHECK_THROWS_AS(store.load(id), StorageError);
  std::ofstream(dir.path / "index.ndjson", std::ios::app) << "garbage\n";
  CHECK_THROWS_AS(store.list(), StorageError);
}

TEST_CASE("diff between snapshots") {
  TempDir dir;
  SnapshotStore store(dir.path);
  const auto g = demo();
  const auto a = store.save(g, propagate(g));
  const auto identity = store.diff(a, a);
  for (const auto& n : identity.nodes) {
    for (double x : n.delta) CHECK(x == 0.0);
  }

  auto lowered = g;
  lowered.find_node("imp-C")->measured_risk = RiskVector::zeros(4);
  const auto b = store.diff(a, store.save(lowered, propagate(lowered)));
  CHECK(b.max_increase() <= 0.0);
  CHECK(b.max_abs_delta[2] > 0.0);

  const RiskGraph other = riskflow::testing::GraphBuilder({"a"}).node("x", {{0.1}});
  const auto c = store.save(other, propagate(other));
  CHECK_THROWS_AS(store.diff(a, c), SchemaMismatch);
}

TEST_CASE("result document round trip") {
  const auto result = propagate(demo());
  const auto text = result_document(result).dump();
  CHECK(parse_result_document(text) == result);
  CHECK_THROWS_AS(parse_result_document("{\"nodes\": 3}"), SchemaError);
  CHECK_THROWS_AS(parse_result_document("[1,"), Error);
}
