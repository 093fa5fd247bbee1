#include "riskflow/core/perspectives.hpp"

#include <algorithm>
#include <set>

#include "riskflow/core/errors.hpp"

namespace riskflow {

PerspectiveSchema::PerspectiveSchema(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.empty()) {
    throw SchemaError("perspective list must not be empty");
  }
  std::set<std::string_view> seen;
  for (const auto& name : names_) {
    if (name.empty()) {
      throw SchemaError("perspective names must not be empty");
    }
    if (!seen.insert(name).second) {
      throw SchemaError("duplicate perspective '" + name + "'");
    }
  }
}

std::optional<std::size_t> PerspectiveSchema::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t PerspectiveSchema::require_index(std::string_view name) const {
  if (auto k = index_of(name)) return *k;
  throw UnknownPerspective("unknown perspective '" + std::string(name) + "'");
}

}  // namespace riskflow
