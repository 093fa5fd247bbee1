#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskflow {

/// Ordered list of risk perspectives. Vector index k refers to names()[k].
class PerspectiveSchema {
 public:
  /// Throws SchemaError when the list is empty, has blanks or duplicates.
  explicit PerspectiveSchema(std::vector<std::string> names);

  std::size_t dimension() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t k) const { return names_.at(k); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Like index_of but throws UnknownPerspective.
  std::size_t require_index(std::string_view name) const;

  friend bool operator==(const PerspectiveSchema&, const PerspectiveSchema&) = default;

 private:
  std::vector<std::string> names_;
};

}  // namespace riskflow
