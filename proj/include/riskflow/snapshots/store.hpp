#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskflow/assessment/assessment.hpp"
#include "riskflow/snapshots/codec.hpp"

namespace riskflow {

struct SnapshotSummary {
  std::string id;
  TimePoint created_at;
  std::string label;

  friend bool operator==(const SnapshotSummary&, const SnapshotSummary&) = default;
};

/// Content id of a (model, result) pair: SHA-256 over their canonical JSON.
std::string snapshot_id(const RiskGraph& model, const PropagationResult& result);

/// Append-only directory store:
///
///   <root>/index.ndjson            one {"id","created_at","label"} record per line
///   <root>/snapshots/<id>.json     self-contained snapshot documents
///   <root>/.lock                   exclusive lock held while writing
///
/// Readers never lock; snapshot files are written to a temporary name and
/// renamed into place, and never modified afterwards.
class SnapshotStore {
 public:
  using Clock = std::function<TimePoint()>;

  /// Creates the directory layout if needed. The clock stamps saved
  /// snapshots and defaults to the system clock.
  explicit SnapshotStore(std::filesystem::path root, Clock clock = {});

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Saves and returns the content id. Saving identical content again returns
  /// the same id and stores nothing new.
  std::string save(const RiskGraph& model, const PropagationResult& result,
                   std::string label = {});

  /// Accepts a full id or a unique prefix of at least four characters.
  Snapshot load(std::string_view id) const;
  std::string resolve(std::string_view id_or_prefix) const;

  /// Chronological, optionally restricted to from <= created_at <= to.
  std::vector<SnapshotSummary> list(std::optional<TimePoint> from = std::nullopt,
                                    std::optional<TimePoint> to = std::nullopt) const;

  /// Throws NotFound or SchemaMismatch.
  RiskDelta diff(std::string_view id_a, std::string_view id_b) const;

 private:
  std::filesystem::path snapshot_path(std::string_view id) const;
  std::vector<SnapshotSummary> read_index() const;

  std::filesystem::path root_;
  Clock clock_;
};

}  // namespace riskflow
