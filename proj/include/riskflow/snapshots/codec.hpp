#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "riskflow/ingest/model_io.hpp"
#include "riskflow/propagation/propagation.hpp"

namespace riskflow {

using TimePoint = std::chrono::system_clock::time_point;

/// A persisted propagation run.
struct Snapshot {
  std::string id;  // content hash of (model, result)
  TimePoint created_at;
  std::string label;
  RiskGraph model;
  PropagationResult result;
};

/// UTC, millisecond precision: 2026-10-15T08:30:00.000Z
std::string format_timestamp(TimePoint tp);
/// Inverse of format_timestamp; throws SchemaError on malformed input.
TimePoint parse_timestamp(std::string_view text);

/// Per-node dr/fr/tr arrays plus run statistics.
Json result_to_json(const PropagationResult& result);
/// Non-empty cause lists keyed by node and perspective.
Json provenance_to_json(const PropagationResult& result);
/// Rebuilds a result from its "result" section and (optionally null) "provenance" section.
PropagationResult result_from_json(const Json& result, const Json& provenance);

/// Standalone result file written by `riskflow propagate --out`.
Json result_document(const PropagationResult& result);

Json snapshot_to_json(const Snapshot& snapshot);
Snapshot snapshot_from_json(const Json& document);

/// Accepts either a result document or a snapshot document.
PropagationResult parse_result_document(std::string_view text);

}  // namespace riskflow
